#ifndef ACIDINV_FORWARD_HPP
#define ACIDINV_FORWARD_HPP

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "acidinv/fem.hpp"
#include "acidinv/model.hpp"

namespace acidinv {

/// Uniform time grid on [0, T].
struct TimeGrid {
    double tau;
    double T;
    int nt;

    /// nt = round(T/tau); throws if nt*tau does not hit T within 1e-12.
    static TimeGrid make(double tau, double T);
    double time(int n) const { return static_cast<double>(n) * tau; }
};

/// One time level of the coupled state (u1, u2, u3), each a GridFunction.
using State = std::array<GridFunction, 3>;

struct InitialCondition {
    GridFunction u1, u2, u3;

    State as_state() const { return {u1, u2, u3}; }
};

/// Gaussian-front initial data compatible with the boundary conditions:
/// u2 = u3 = exp(-(x/x0)^2), u1 = 1 - u2, with the Dirichlet node forced
/// exactly to (1, 0, 0).
InitialCondition default_initial_condition(const Mesh1D& mesh, double x0);

struct NewtonOptions {
    double tol = 1e-12;  ///< absolute inf-norm residual tolerance
    int max_iter = 25;
};

struct ForwardOptions {
    NewtonOptions newton;
    // Test-harness knobs: drop the diffusion terms / the Dirichlet row
    // replacement to expose the spatially-constant ODE mode.
    bool disable_diffusion = false;
    bool skip_dirichlet = false;
    // When set, receives the Newton residual norms of every time step.
    std::vector<std::vector<double>>* newton_residual_history = nullptr;
};

/// Nodal values of (u1,u2,u3) on the full space-time grid.
struct StateTrajectory {
    int nod = 0;
    int nt = 0;
    /// u[i][n][j]: field i, time level n, node j.
    std::array<std::vector<GridFunction>, 3> u;

    State level(int n) const { return {u[0][n], u[1][n], u[2][n]}; }
};

struct StepFailureError : std::runtime_error {
    int step;
    double residual_norm;
    StepFailureError(int step_, double norm_);
};

/// Weak spatial operator F(U) (stiffness terms minus reaction integrals)
/// and its exact block-tridiagonal Jacobian. No mass, no tau scaling, no
/// Dirichlet rows; the nonlinear integrands use 3-point Gauss per element
/// on the piecewise-linear interpolants.
struct SpatialSystem {
    std::vector<Vec3> F;
    BlockTridiagonal J;
};
SpatialSystem assemble_spatial(const State& U, const NondimParams& p,
                               const Mesh1D& mesh,
                               bool disable_diffusion = false);

/// Residual M(U^n - U^{n-1}) + tau*F(U^n) of one implicit Euler step and
/// its Jacobian M + tau*J, with Dirichlet rows replaced by identity.
struct StepSystem {
    std::vector<Vec3> residual;
    BlockTridiagonal jacobian;
};
StepSystem step_residual(const State& Un, const State& Uprev,
                         const NondimParams& p, const Mesh1D& mesh, double tau,
                         const ForwardOptions& opts = {});

/// Implicit Euler in time, Newton per step.
StateTrajectory solve_forward(const NondimParams& p,
                              const InitialCondition& ic, const Mesh1D& mesh,
                              const TimeGrid& tg,
                              const ForwardOptions& opts = {});

/// CSV export: header t,x,u1,u2,u3, one row per node per step.
void export_trajectory_csv(const StateTrajectory& traj, const Mesh1D& mesh,
                           const TimeGrid& tg, std::ostream& os);

}  // namespace acidinv

#endif
