#ifndef ACIDINV_OPTIMIZER_HPP
#define ACIDINV_OPTIMIZER_HPP

#include <iosfwd>

#include "acidinv/objective.hpp"

namespace acidinv {

struct OptimOptions {
    double lo = 0.0;  ///< admissible interval U_ad
    double hi = 20.0;
    double grad_tol_rel = 1e-8;  ///< grad_tol = grad_tol_rel * (1 + |J(x0)|)
    double step_tol = 1e-10;
    int max_iter = 100;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;

    void validate() const;
};

struct FitTracePoint {
    double delta1;
    double J;
    double grad;
};

struct FitResult {
    double delta1_star = 0.0;
    double J_star = 0.0;
    double grad_star = 0.0;
    int iterations = 0;
    std::vector<FitTracePoint> trace;
    bool converged = false;
};

struct FitError : std::runtime_error {
    std::vector<FitTracePoint> trace;
    FitError(const std::string& what, std::vector<FitTracePoint> trace_);
};

/// Clamp onto [lo, hi].
double project(double delta1, double lo, double hi);

/// Projected secant-Newton descent with Armijo backtracking on the reduced
/// functional. One forward+adjoint solve per iteration for the gradient;
/// the line search performs forward solves only.
FitResult fit(const ObservationSet& obs, double delta1_0,
              const OptimOptions& opts, const SolverContext& ctx);

/// CSV export: header iter,delta1,J,grad.
void export_fit_trace_csv(const FitResult& result, std::ostream& os);

}  // namespace acidinv

#endif
