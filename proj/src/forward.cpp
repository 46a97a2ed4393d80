#include "acidinv/forward.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace acidinv {

namespace {

void write_row(std::ostream& os, std::initializer_list<double> vals) {
    char buf[64];
    bool first = true;
    for (double v : vals) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        if (!first) os << ',';
        os << buf;
        first = false;
    }
    os << '\n';
}

}  // namespace

TimeGrid TimeGrid::make(double tau, double T) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("tau must be positive");
    }
    const int nt = static_cast<int>(std::lround(T / tau));
    if (nt < 1 || std::fabs(nt * tau - T) > 1e-12 * std::max(1.0, std::fabs(T))) {
        throw std::invalid_argument("T is not an integer multiple of tau");
    }
    return TimeGrid{tau, T, nt};
}

InitialCondition default_initial_condition(const Mesh1D& mesh, double x0) {
    if (!(x0 > 0.0 && x0 < 1.0)) {
        throw std::invalid_argument("front width x0 must lie in (0,1)");
    }
    InitialCondition ic;
    ic.u1.resize(mesh.nod);
    ic.u2.resize(mesh.nod);
    ic.u3.resize(mesh.nod);
    for (int j = 0; j < mesh.nod; ++j) {
        const double x = mesh.node(j);
        const double g = std::exp(-(x / x0) * (x / x0));
        ic.u1[j] = 1.0 - g;
        ic.u2[j] = g;
        ic.u3[j] = g;
    }
    ic.u1[mesh.nod - 1] = 1.0;
    ic.u2[mesh.nod - 1] = 0.0;
    ic.u3[mesh.nod - 1] = 0.0;
    return ic;
}

StepFailureError::StepFailureError(int step_, double norm_)
    : std::runtime_error("Newton failed to converge at time step " +
                         std::to_string(step_) + ", residual norm " +
                         std::to_string(norm_)),
      step(step_),
      residual_norm(norm_) {}

SpatialSystem assemble_spatial(const State& U, const NondimParams& p,
                               const Mesh1D& mesh, bool disable_diffusion) {
    static const GaussRule3 gauss;
    const int nod = mesh.nod;
    const double h = mesh.h;
    SpatialSystem sys;
    sys.F.assign(nod, Vec3{});
    sys.J = BlockTridiagonal(nod);

    // Accumulates into the tridiagonal block (row node j, col node k).
    auto block_at = [&sys](int j, int k) -> Mat3& {
        if (k == j) return sys.J.diag[j];
        return (k == j + 1) ? sys.J.super[j] : sys.J.sub[j];
    };

    for (int e = 0; e < mesh.num_elements(); ++e) {
        const int l = e, r = e + 1;
        const double u1l = U[0][l], u1r = U[0][r];
        const double u2l = U[1][l], u2r = U[1][r];
        const double u3l = U[2][l], u3r = U[2][r];

        // Reaction integrals on the interpolant, 3-point Gauss.
        for (int q = 0; q < 3; ++q) {
            const double s = gauss.pts[q];
            const double dx = h * gauss.wts[q];
            const double N[2] = {1.0 - s, s};
            const double v1 = u1l * N[0] + u1r * N[1];
            const double v2 = u2l * N[0] + u2r * N[1];
            const double v3 = u3l * N[0] + u3r * N[1];
            const ReactionValue f = reaction(v1, v2, v3, p);
            const ReactionJacobian df = reaction_jacobian(v1, v2, v3, p);
            const double fv[3] = {f.f1, f.f2, f.f3};
            for (int a = 0; a < 2; ++a) {
                const int j = l + a;
                for (int i = 0; i < 3; ++i) sys.F[j][i] -= dx * fv[i] * N[a];
                for (int b = 0; b < 2; ++b) {
                    Mat3& blk = block_at(j, l + b);
                    const double wab = dx * N[a] * N[b];
                    for (int i = 0; i < 3; ++i)
                        for (int c = 0; c < 3; ++c)
                            blk.m[i][c] -= wab * df.d[i][c];
                }
            }
        }

        if (disable_diffusion) continue;

        // u2 diffusion with weight D2*(1-u1), element-midpoint value.
        const double we = p.D2 * (1.0 - 0.5 * (u1l + u1r));
        const double ke = we / h;
        const double du2 = u2l - u2r;
        sys.F[l][1] += ke * du2;
        sys.F[r][1] -= ke * du2;
        block_at(l, l).m[1][1] += ke;
        block_at(l, r).m[1][1] -= ke;
        block_at(r, l).m[1][1] -= ke;
        block_at(r, r).m[1][1] += ke;
        // Coupling from differentiating the (1-u1) weight.
        const double cpl = -0.5 * p.D2 * du2 / h;
        block_at(l, l).m[1][0] += cpl;
        block_at(l, r).m[1][0] += cpl;
        block_at(r, l).m[1][0] -= cpl;
        block_at(r, r).m[1][0] -= cpl;

        // u3 diffusion, unit coefficient.
        const double du3 = u3l - u3r;
        sys.F[l][2] += du3 / h;
        sys.F[r][2] -= du3 / h;
        block_at(l, l).m[2][2] += 1.0 / h;
        block_at(l, r).m[2][2] -= 1.0 / h;
        block_at(r, l).m[2][2] -= 1.0 / h;
        block_at(r, r).m[2][2] += 1.0 / h;
    }
    return sys;
}

StepSystem step_residual(const State& Un, const State& Uprev,
                         const NondimParams& p, const Mesh1D& mesh, double tau,
                         const ForwardOptions& opts) {
    const int nod = mesh.nod;
    const Tridiagonal M = assemble_mass(mesh);
    SpatialSystem sp = assemble_spatial(Un, p, mesh, opts.disable_diffusion);

    StepSystem out;
    out.residual.assign(nod, Vec3{});
    out.jacobian = std::move(sp.J);

    for (int j = 0; j < nod; ++j) {
        for (int i = 0; i < 3; ++i) {
            double mu = M.diag[j] * (Un[i][j] - Uprev[i][j]);
            if (j > 0) mu += M.sub[j] * (Un[i][j - 1] - Uprev[i][j - 1]);
            if (j < nod - 1) mu += M.super[j] * (Un[i][j + 1] - Uprev[i][j + 1]);
            out.residual[j][i] = mu + tau * sp.F[j][i];
        }
        // Scale the spatial Jacobian by tau and add the mass blocks.
        for (Mat3* blk : {&out.jacobian.diag[j], &out.jacobian.sub[j],
                          &out.jacobian.super[j]}) {
            for (int i = 0; i < 3; ++i)
                for (int c = 0; c < 3; ++c) blk->m[i][c] *= tau;
        }
        for (int i = 0; i < 3; ++i) {
            out.jacobian.diag[j].m[i][i] += M.diag[j];
            if (j > 0) out.jacobian.sub[j].m[i][i] += M.sub[j];
            if (j < nod - 1) out.jacobian.super[j].m[i][i] += M.super[j];
        }
    }

    if (!opts.skip_dirichlet) {
        const int last = nod - 1;
        out.residual[last] = {Un[0][last] - 1.0, Un[1][last], Un[2][last]};
        out.jacobian.diag[last] = Mat3::identity();
        out.jacobian.sub[last] = Mat3::zero();
    }
    return out;
}

namespace {

double inf_norm(const std::vector<Vec3>& v) {
    double m = 0.0;
    for (const Vec3& x : v)
        for (double c : x) m = std::max(m, std::fabs(c));
    return m;
}

}  // namespace

StateTrajectory solve_forward(const NondimParams& p,
                              const InitialCondition& ic, const Mesh1D& mesh,
                              const TimeGrid& tg, const ForwardOptions& opts) {
    const int nod = mesh.nod;
    if (static_cast<int>(ic.u1.size()) != nod ||
        static_cast<int>(ic.u2.size()) != nod ||
        static_cast<int>(ic.u3.size()) != nod) {
        throw std::invalid_argument("initial condition size does not match mesh");
    }
    if (!opts.skip_dirichlet &&
        (ic.u1[nod - 1] != 1.0 || ic.u2[nod - 1] != 0.0 ||
         ic.u3[nod - 1] != 0.0)) {
        throw std::invalid_argument(
            "initial condition violates the Dirichlet values (1,0,0) at x=1");
    }

    StateTrajectory traj;
    traj.nod = nod;
    traj.nt = tg.nt;
    for (int i = 0; i < 3; ++i) traj.u[i].reserve(tg.nt + 1);
    traj.u[0].push_back(ic.u1);
    traj.u[1].push_back(ic.u2);
    traj.u[2].push_back(ic.u3);

    State prev = ic.as_state();
    for (int n = 1; n <= tg.nt; ++n) {
        State cur = prev;  // continuation initial guess
        std::vector<double> history;
        bool converged = false;
        double norm = 0.0;
        for (int it = 0; it <= opts.newton.max_iter; ++it) {
            StepSystem sys = step_residual(cur, prev, p, mesh, tg.tau, opts);
            norm = inf_norm(sys.residual);
            history.push_back(norm);
            if (!std::isfinite(norm)) break;
            if (norm < opts.newton.tol) {
                converged = true;
                break;
            }
            if (it == opts.newton.max_iter) break;
            for (Vec3& r : sys.residual)
                for (double& c : r) c = -c;
            std::vector<Vec3> delta =
                solve_block_tridiagonal(sys.jacobian, sys.residual);
            for (int j = 0; j < nod; ++j)
                for (int i = 0; i < 3; ++i) cur[i][j] += delta[j][i];
        }
        if (opts.newton_residual_history)
            opts.newton_residual_history->push_back(history);
        if (!converged) throw StepFailureError(n, norm);
        for (int i = 0; i < 3; ++i) traj.u[i].push_back(cur[i]);
        prev = cur;
    }
    return traj;
}

void export_trajectory_csv(const StateTrajectory& traj, const Mesh1D& mesh,
                           const TimeGrid& tg, std::ostream& os) {
    os << "t,x,u1,u2,u3\n";
    for (int n = 0; n <= traj.nt; ++n) {
        for (int j = 0; j < traj.nod; ++j) {
            write_row(os, {tg.time(n), mesh.node(j), traj.u[0][n][j],
                           traj.u[1][n][j], traj.u[2][n][j]});
        }
    }
}

}  // namespace acidinv
