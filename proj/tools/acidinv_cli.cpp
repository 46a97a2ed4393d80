// Command-line surface for the acid-invasion parameter estimation library:
// forward/adjoint solves, gradient checks, fits, functional sweeps, noise
// and recovery studies, and the a posteriori error estimate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "acidinv/adjoint.hpp"
#include "acidinv/error_estimate.hpp"
#include "acidinv/experiments.hpp"
#include "acidinv/objective.hpp"
#include "acidinv/optimizer.hpp"

using namespace acidinv;

namespace {

struct CliState {
    ExperimentConfig cfg;
    double delta1 = 8.0;      // evaluation point for forward/adjoint/gradcheck
    std::string out;          // empty = stdout
    std::string obs_path;     // observation CSV input, empty = synthetic
    std::vector<double> bounds;
    int samples = 41;
};

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    return file;
}

ObservationSet load_or_synthesize(const CliState& st, double sigma) {
    if (!st.obs_path.empty()) {
        std::ifstream in(st.obs_path);
        if (!in)
            throw std::runtime_error("cannot open observation file " +
                                     st.obs_path);
        const SolverContext ctx = st.cfg.make_context();
        return read_observation_csv(in, ctx.mesh, ctx.tg);
    }
    return generate_synthetic(st.cfg, sigma, st.cfg.seed);
}

void add_shared_options(CLI::App* cmd, CliState& st) {
    cmd->add_option("--nod", st.cfg.nod, "number of spatial nodes");
    cmd->add_option("--tau", st.cfg.tau, "time step");
    cmd->add_option("--t-final", st.cfg.T, "final time T");
    cmd->add_option("--rho2", st.cfg.rho2, "growth-rate ratio rho2");
    cmd->add_option("--d2", st.cfg.D2, "diffusion ratio D2");
    cmd->add_option("--delta3", st.cfg.delta3, "reabsorption group delta3");
    cmd->add_option("--seed", st.cfg.seed, "PRNG seed");
    cmd->add_option("--x0", st.cfg.ic_front_width,
                    "initial tumor front width");
    cmd->add_option("--out", st.out, "output path (default stdout)");
    cmd->add_option("--delta1-hat", st.cfg.delta1_hat,
                    "true delta1 for synthetic data");
    cmd->add_option("--obs", st.obs_path, "observation CSV (x,t,u3hat)");
    cmd->add_option("--bounds", st.bounds, "admissible interval lo,hi")
        ->delimiter(',');
    cmd->set_config("--config", "", "flat key=value config file");
}

void apply_bounds(CliState& st) {
    if (st.bounds.empty()) return;
    if (st.bounds.size() != 2)
        throw CLI::ValidationError("--bounds expects lo,hi");
    st.cfg.lo = st.bounds[0];
    st.cfg.hi = st.bounds[1];
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acid-mediated tumor invasion: forward/adjoint solvers and "
                 "delta1 estimation"};
    app.require_subcommand(1);

    CliState st;
    std::vector<double> sigma_opt;
    double delta1_init = 8.0;
    bool random_init = false;
    int trials = -1;
    std::vector<double> delta1_hats = {0.5, 4.0, 12.5, 16.0};

    auto* c_forward = app.add_subcommand("forward", "solve the direct problem");
    c_forward->add_option("--delta1", st.delta1, "delta1 value");
    add_shared_options(c_forward, st);

    auto* c_adjoint = app.add_subcommand("adjoint", "solve the adjoint problem");
    c_adjoint->add_option("--delta1", st.delta1, "delta1 value");
    c_adjoint->add_option("--sigma", sigma_opt, "observation noise std dev");
    add_shared_options(c_adjoint, st);

    auto* c_grad = app.add_subcommand(
        "gradcheck", "compare adjoint and finite-difference gradients");
    c_grad->add_option("--delta1", st.delta1, "evaluation point");
    add_shared_options(c_grad, st);

    auto* c_fit = app.add_subcommand("fit", "estimate delta1 from data");
    c_fit->add_option("--delta1-init", delta1_init, "initial guess");
    c_fit->add_option("--sigma", sigma_opt, "observation noise std dev");
    add_shared_options(c_fit, st);

    auto* c_sweep =
        app.add_subcommand("sweep", "sample the reduced functional");
    c_sweep->add_option("--samples", st.samples, "number of samples");
    add_shared_options(c_sweep, st);

    auto* c_noise = app.add_subcommand("noise-study",
                                       "noise robustness study (one table)");
    c_noise->add_option("--sigma", sigma_opt, "noise levels (repeatable)");
    c_noise->add_option("--trials", trials, "trials per noise level");
    c_noise->add_option("--delta1-init", delta1_init, "initial guess");
    c_noise->add_flag("--random-init", random_init,
                      "draw delta1_0 uniformly in the bounds");
    add_shared_options(c_noise, st);

    auto* c_recov = app.add_subcommand(
        "recovery-study", "noiseless recovery from random starts");
    c_recov->add_option("--delta1-hats", delta1_hats,
                        "true delta1 values (repeatable)")
        ->delimiter(',');
    c_recov->add_option("--trials", trials, "starts per value");
    add_shared_options(c_recov, st);

    auto* c_err = app.add_subcommand("error-estimate",
                                     "a posteriori error indicators");
    c_err->add_option("--delta1", st.delta1, "delta1 value");
    add_shared_options(c_err, st);

    CLI11_PARSE(app, argc, argv);

    try {
        apply_bounds(st);
        if (trials > 0) st.cfg.trials = trials;
        if (!sigma_opt.empty()) st.cfg.sigmas = sigma_opt;
        st.cfg.delta1_init = delta1_init;
        st.cfg.random_init = random_init;
        const double sigma0 = sigma_opt.empty() ? 0.0 : sigma_opt.front();

        std::ofstream file;
        if (c_forward->parsed()) {
            const SolverContext ctx = st.cfg.make_context();
            const StateTrajectory traj = solve_forward(
                ctx.with_delta1(st.delta1), ctx.ic, ctx.mesh, ctx.tg);
            export_trajectory_csv(traj, ctx.mesh, ctx.tg,
                                  open_out(st.out, file));
        } else if (c_adjoint->parsed()) {
            const SolverContext ctx = st.cfg.make_context();
            const ObservationSet obs = load_or_synthesize(st, sigma0);
            const NondimParams p = ctx.with_delta1(st.delta1);
            const StateTrajectory traj =
                solve_forward(p, ctx.ic, ctx.mesh, ctx.tg);
            const AdjointTrajectory adj =
                solve_adjoint(p, traj, obs, ctx.mesh, ctx.tg);
            export_adjoint_csv(adj, ctx.mesh, ctx.tg, open_out(st.out, file));
        } else if (c_grad->parsed()) {
            const SolverContext ctx = st.cfg.make_context();
            const ObservationSet obs = load_or_synthesize(st, 0.0);
            const ReducedEval ev =
                reduced_objective_gradient(st.delta1, ctx, obs);
            // FD step tied to the time step so the oracle's truncation
            // refines along with the grid (equals the 1e-4-scaled default
            // at the baseline tau = 0.5).
            const double fd_step =
                2e-4 * st.cfg.tau * std::max(1.0, std::fabs(st.delta1));
            const double fd = gradient_fd(st.delta1, ctx, obs, fd_step);
            const double rel = std::fabs(ev.grad - fd) /
                               std::max(1e-300, std::fabs(fd));
            std::ostream& os = open_out(st.out, file);
            os << "delta1,J,grad_adjoint,grad_fd,rel_error\n";
            char buf[200];
            std::snprintf(buf, sizeof(buf),
                          "%.17g,%.17g,%.17g,%.17g,%.17g\n", st.delta1, ev.J,
                          ev.grad, fd, rel);
            os << buf;
        } else if (c_fit->parsed()) {
            const SolverContext ctx = st.cfg.make_context();
            const ObservationSet obs = load_or_synthesize(st, sigma0);
            const FitResult res =
                fit(obs, delta1_init, st.cfg.make_optim_options(), ctx);
            export_fit_trace_csv(res, open_out(st.out, file));
            std::fprintf(stderr,
                         "delta1* = %.10g  J = %.6g  |grad| = %.3g  "
                         "iterations = %d  converged = %s\n",
                         res.delta1_star, res.J_star,
                         std::fabs(res.grad_star), res.iterations,
                         res.converged ? "yes" : "no");
        } else if (c_sweep->parsed()) {
            const auto pts = run_functional_sweep(st.cfg, st.cfg.lo,
                                                  st.cfg.hi, st.samples);
            write_sweep_csv(pts, open_out(st.out, file));
        } else if (c_noise->parsed()) {
            const auto rows = run_noise_study(st.cfg);
            write_noise_study_csv(rows, st.cfg, open_out(st.out, file));
        } else if (c_recov->parsed()) {
            st.cfg.random_init = true;
            if (st.cfg.trials == 30 && trials <= 0) st.cfg.trials = 10;
            const auto rows = run_recovery_study(st.cfg, delta1_hats);
            write_recovery_csv(rows, st.cfg, open_out(st.out, file));
        } else if (c_err->parsed()) {
            const SolverContext ctx = st.cfg.make_context();
            const NondimParams p = ctx.with_delta1(st.delta1);
            const StateTrajectory traj =
                solve_forward(p, ctx.ic, ctx.mesh, ctx.tg);
            const ErrorEstimate est =
                estimate_aposteriori(traj, p, ctx.mesh, ctx.tg);
            export_error_csv(est, open_out(st.out, file));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
