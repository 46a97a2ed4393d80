#ifndef ACIDINV_OBJECTIVE_HPP
#define ACIDINV_OBJECTIVE_HPP

#include <cstdint>
#include <functional>
#include <optional>

#include "acidinv/forward.hpp"

namespace acidinv {

/// Measured (or synthetic) excess-acid data on the solver grid.
struct ObservationSet {
    int nod = 0;
    int nt = 0;
    /// uhat3[n][j]: observed u3 at time level n, node j.
    std::vector<GridFunction> uhat3;

    struct NoiseMeta {
        double sigma;
        std::uint64_t seed;
    };
    std::optional<NoiseMeta> noise;
};

/// Misfit J = 1/2 sum_n w_n (u3^n - uhat3^n)^T M (u3^n - uhat3^n) with
/// trapezoid weights in time. Throws std::invalid_argument on grid mismatch.
double objective(const StateTrajectory& traj, const ObservationSet& obs,
                 const Mesh1D& mesh, const TimeGrid& tg);

// AdjointTrajectory is defined in adjoint.hpp; forward declaration keeps the
// two headers independent.
struct AdjointTrajectory;

/// dJ/ddelta1 via the adjoint identity: space-time quadrature of
/// u1*u3*lambda1, trapezoid in time and 3-point Gauss in space.
double gradient_adjoint(const StateTrajectory& traj,
                        const AdjointTrajectory& adj, const Mesh1D& mesh,
                        const TimeGrid& tg);

/// Everything needed to evaluate the reduced functional at a given delta1.
struct SolverContext {
    NondimParams base;  ///< delta1 is overridden per evaluation
    InitialCondition ic;
    Mesh1D mesh;
    TimeGrid tg;
    ForwardOptions forward_opts;

    NondimParams with_delta1(double delta1) const {
        NondimParams p = base;
        p.delta1 = delta1;
        return p;
    }
};

/// One forward solve followed by the misfit evaluation.
double reduced_objective(double delta1, const SolverContext& ctx,
                         const ObservationSet& obs);

struct ReducedEval {
    double J;
    double grad;
    StateTrajectory traj;
};

/// One forward and one adjoint solve: value and adjoint gradient together.
ReducedEval reduced_objective_gradient(double delta1, const SolverContext& ctx,
                                       const ObservationSet& obs);

/// Central finite difference (f(x+s) - f(x-s)) / (2s).
double central_difference(const std::function<double(double)>& f, double x,
                          double step);

/// Finite-difference oracle for the reduced gradient; two full forward
/// solves. Default step 1e-4 * max(1, |delta1|).
double gradient_fd(double delta1, const SolverContext& ctx,
                   const ObservationSet& obs, double step = 0.0);

}  // namespace acidinv

#endif
