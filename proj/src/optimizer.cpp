#include "acidinv/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "acidinv/adjoint.hpp"

namespace acidinv {

void OptimOptions::validate() const {
    if (!(lo < hi)) throw std::invalid_argument("bounds: lo must be < hi");
    if (!(grad_tol_rel > 0.0) || !(step_tol > 0.0))
        throw std::invalid_argument("tolerances must be positive");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0))
        throw std::invalid_argument("armijo c1 must lie in (0,1)");
    if (!(backtrack > 0.0 && backtrack < 1.0))
        throw std::invalid_argument("backtrack factor must lie in (0,1)");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

FitError::FitError(const std::string& what, std::vector<FitTracePoint> trace_)
    : std::runtime_error(what), trace(std::move(trace_)) {}

double project(double delta1, double lo, double hi) {
    return std::min(hi, std::max(lo, delta1));
}

namespace {

double safeguard_curvature(double B, double grad, double span) {
    if (std::isfinite(B) && B > 1e-12) return B;
    return std::max(1e-8, std::fabs(grad) / (0.1 * span));
}

}  // namespace

FitResult fit(const ObservationSet& obs, double delta1_0,
              const OptimOptions& opts, const SolverContext& ctx) {
    opts.validate();
    if (delta1_0 < opts.lo || delta1_0 > opts.hi) {
        throw std::invalid_argument("initial delta1 outside the bounds");
    }
    const double span = opts.hi - opts.lo;

    FitResult res;
    double x = delta1_0;
    ReducedEval ev;
    try {
        ev = reduced_objective_gradient(x, ctx, obs);
    } catch (const std::exception& e) {
        throw FitError(std::string("initial evaluation failed: ") + e.what(),
                       {});
    }
    double J = ev.J, g = ev.grad;
    res.trace.push_back({x, J, g});

    const double grad_tol = opts.grad_tol_rel * (1.0 + std::fabs(J));
    auto projected_gradient = [&](double xi, double gi) {
        return xi - project(xi - gi, opts.lo, opts.hi);
    };

    if (std::fabs(projected_gradient(x, g)) < grad_tol) {
        res.converged = true;
    } else {
        // Initial secant curvature from one extra gradient nearby.
        double xb = project(x + 1e-2 * span, opts.lo, opts.hi);
        if (xb == x) xb = project(x - 1e-2 * span, opts.lo, opts.hi);
        double B;
        try {
            const ReducedEval evb = reduced_objective_gradient(xb, ctx, obs);
            B = (evb.grad - g) / (xb - x);
        } catch (const std::exception&) {
            B = 0.0;  // safeguarded below
        }
        B = safeguard_curvature(B, g, span);

        while (static_cast<int>(res.trace.size()) < opts.max_iter) {
            const double dir = -g / B;
            double alpha = 1.0;
            bool accepted = false;
            bool step_too_small = false;
            int failures = 0;
            double xt = x, Jt = J;
            StateTrajectory traj_t;
            while (!accepted) {
                xt = project(x + alpha * dir, opts.lo, opts.hi);
                const double s = xt - x;
                if (std::fabs(s) < opts.step_tol) {
                    step_too_small = true;
                    break;
                }
                bool eval_ok = true;
                try {
                    traj_t = solve_forward(ctx.with_delta1(xt), ctx.ic,
                                           ctx.mesh, ctx.tg, ctx.forward_opts);
                    Jt = objective(traj_t, obs, ctx.mesh, ctx.tg);
                } catch (const std::exception& e) {
                    eval_ok = false;
                    if (++failures > 60) {
                        throw FitError(
                            std::string("persistent solver failure during "
                                        "line search: ") +
                                e.what(),
                            res.trace);
                    }
                }
                if (eval_ok && Jt <= J + opts.armijo_c1 * g * s) {
                    accepted = true;
                } else {
                    alpha *= opts.backtrack;
                }
            }
            if (step_too_small) {
                res.converged = true;
                break;
            }
            // Gradient at the accepted point reuses the line-search solve.
            const NondimParams pt = ctx.with_delta1(xt);
            const AdjointTrajectory adj =
                solve_adjoint(pt, traj_t, obs, ctx.mesh, ctx.tg);
            const double gt = gradient_adjoint(traj_t, adj, ctx.mesh, ctx.tg);

            B = safeguard_curvature((gt - g) / (xt - x), gt, span);
            x = xt;
            J = Jt;
            g = gt;
            res.trace.push_back({x, J, g});
            if (std::fabs(projected_gradient(x, g)) < grad_tol) {
                res.converged = true;
                break;
            }
        }
    }

    res.delta1_star = x;
    res.J_star = J;
    res.grad_star = g;
    res.iterations = static_cast<int>(res.trace.size());
    return res;
}

void export_fit_trace_csv(const FitResult& result, std::ostream& os) {
    os << "iter,delta1,J,grad\n";
    char buf[64];
    int k = 0;
    for (const FitTracePoint& p : result.trace) {
        os << k++;
        const double vals[3] = {p.delta1, p.J, p.grad};
        for (double v : vals) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            os << ',' << buf;
        }
        os << '\n';
    }
}

}  // namespace acidinv
