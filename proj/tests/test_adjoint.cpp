#include <cmath>
#include <random>

#include "acidinv/adjoint.hpp"
#include "doctest.h"

using namespace acidinv;

namespace {

const NondimParams kBaseline{0.5, 1.0, 4e-5, 1.0};

StateTrajectory baseline_trajectory(int nod, const TimeGrid& tg,
                                    const NondimParams& p) {
    const Mesh1D mesh = Mesh1D::uniform(nod);
    const InitialCondition ic = default_initial_condition(mesh, 0.1);
    return solve_forward(p, ic, mesh, tg);
}

ObservationSet exact_observations(const StateTrajectory& traj) {
    ObservationSet obs;
    obs.nod = traj.nod;
    obs.nt = traj.nt;
    obs.uhat3 = traj.u[2];
    return obs;
}

using Levels = std::vector<std::vector<Vec3>>;  // [level][node]

double dot(const Levels& a, const Levels& b, std::size_t a0, std::size_t b0,
           std::size_t count) {
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t j = 0; j < a[a0 + k].size(); ++j)
            for (int i = 0; i < 3; ++i) s += a[a0 + k][j][i] * b[b0 + k][j][i];
    return s;
}

std::vector<Vec3> mass_apply(const Tridiagonal& M, const std::vector<Vec3>& x) {
    std::vector<Vec3> y(x.size(), Vec3{});
    for (std::size_t j = 0; j < x.size(); ++j)
        for (int i = 0; i < 3; ++i) {
            double s = M.diag[j] * x[j][i];
            if (j > 0) s += M.sub[j] * x[j - 1][i];
            if (j + 1 < x.size()) s += M.super[j] * x[j + 1][i];
            y[j][i] = s;
        }
    return y;
}

}  // namespace

TEST_CASE("exact observations give an identically zero adjoint") {
    const Mesh1D mesh = Mesh1D::uniform(31);
    const TimeGrid tg = TimeGrid::make(0.5, 5.0);
    const StateTrajectory traj = baseline_trajectory(31, tg, kBaseline);
    const ObservationSet obs = exact_observations(traj);
    const AdjointTrajectory adj =
        solve_adjoint(kBaseline, traj, obs, mesh, tg);
    for (int i = 0; i < 3; ++i)
        for (int n = 0; n <= tg.nt; ++n)
            for (int j = 0; j < 31; ++j)
                CHECK(adj.lambda[i][n][j] == 0.0);
}

TEST_CASE("final condition and Dirichlet boundary hold exactly") {
    const Mesh1D mesh = Mesh1D::uniform(21);
    const TimeGrid tg = TimeGrid::make(0.5, 4.0);
    const StateTrajectory traj = baseline_trajectory(21, tg, kBaseline);
    ObservationSet obs = exact_observations(traj);
    for (auto& level : obs.uhat3)
        for (int j = 0; j < 21; ++j) level[j] += 0.05 * (j % 3);
    const AdjointTrajectory adj =
        solve_adjoint(kBaseline, traj, obs, mesh, tg);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 21; ++j) CHECK(adj.lambda[i][tg.nt][j] == 0.0);
        for (int n = 0; n <= tg.nt; ++n) CHECK(adj.lambda[i][n][20] == 0.0);
    }
    // gamma is the zero-time level
    const State g = adj.gamma();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 21; ++j) CHECK(g[i][j] == adj.lambda[i][0][j]);
}

TEST_CASE("adjoint solution is linear in the data source") {
    const Mesh1D mesh = Mesh1D::uniform(21);
    const TimeGrid tg = TimeGrid::make(0.5, 4.0);
    const StateTrajectory traj = baseline_trajectory(21, tg, kBaseline);
    ObservationSet obs1 = exact_observations(traj);
    ObservationSet obs2 = exact_observations(traj);
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int n = 0; n <= tg.nt; ++n)
        for (int j = 0; j < 20; ++j) {
            const double d = u(gen);
            obs1.uhat3[n][j] = traj.u[2][n][j] - d;
            obs2.uhat3[n][j] = traj.u[2][n][j] - 2.0 * d;
        }
    const AdjointTrajectory a1 = solve_adjoint(kBaseline, traj, obs1, mesh, tg);
    const AdjointTrajectory a2 = solve_adjoint(kBaseline, traj, obs2, mesh, tg);
    for (int i = 0; i < 3; ++i)
        for (int n = 0; n <= tg.nt; ++n)
            for (int j = 0; j < 21; ++j) {
                const double scale =
                    std::max(1e-12, std::fabs(a2.lambda[i][n][j]));
                CHECK(std::fabs(2.0 * a1.lambda[i][n][j] -
                                a2.lambda[i][n][j]) /
                          scale <
                      1e-9);
            }
}

TEST_CASE("discrete duality of the derivative and adjoint forms") {
    const int nod = 11;
    const Mesh1D mesh = Mesh1D::uniform(nod);
    const TimeGrid tg = TimeGrid::make(0.5, 2.0);
    const int nt = tg.nt;  // 4
    const StateTrajectory traj = baseline_trajectory(nod, tg, kBaseline);
    const Tridiagonal M = assemble_mass(mesh);

    // Spatial Jacobians at the adjoint's declared time level n-1.
    std::vector<BlockTridiagonal> S, St;
    for (int n = 1; n <= nt; ++n) {
        BlockTridiagonal J =
            assemble_spatial(traj.level(n - 1), kBaseline, mesh).J;
        St.push_back(J.transposed());
        S.push_back(std::move(J));
    }

    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        // eta on levels 0..nt, zeta on levels 1..nt, both zero at x = 1.
        Levels eta(nt + 1, std::vector<Vec3>(nod, Vec3{}));
        Levels zeta(nt + 1, std::vector<Vec3>(nod, Vec3{}));
        for (int n = 0; n <= nt; ++n)
            for (int j = 0; j < nod - 1; ++j)
                for (int i = 0; i < 3; ++i) {
                    eta[n][j][i] = u(gen);
                    if (n >= 1) zeta[n][j][i] = u(gen);
                }

        // Forward derivative action, levels 1..nt.
        Levels Aeta(nt + 1, std::vector<Vec3>(nod, Vec3{}));
        for (int n = 1; n <= nt; ++n) {
            std::vector<Vec3> d(nod);
            for (int j = 0; j < nod; ++j)
                for (int i = 0; i < 3; ++i)
                    d[j][i] = eta[n][j][i] - eta[n - 1][j][i];
            const std::vector<Vec3> Md = mass_apply(M, d);
            const std::vector<Vec3> Sv = S[n - 1].apply(eta[n]);
            for (int j = 0; j < nod; ++j)
                for (int i = 0; i < 3; ++i)
                    Aeta[n][j][i] = Md[j][i] + tg.tau * Sv[j][i];
        }

        // Adjoint action, levels 0..nt, from the transposed blocks.
        Levels Astar(nt + 1, std::vector<Vec3>(nod, Vec3{}));
        for (int m = 0; m <= nt; ++m) {
            std::vector<Vec3> acc(nod, Vec3{});
            if (m >= 1) {
                const std::vector<Vec3> Mz = mass_apply(M, zeta[m]);
                const std::vector<Vec3> Sz = St[m - 1].apply(zeta[m]);
                for (int j = 0; j < nod; ++j)
                    for (int i = 0; i < 3; ++i)
                        acc[j][i] += Mz[j][i] + tg.tau * Sz[j][i];
            }
            if (m + 1 <= nt) {
                const std::vector<Vec3> Mz = mass_apply(M, zeta[m + 1]);
                for (int j = 0; j < nod; ++j)
                    for (int i = 0; i < 3; ++i) acc[j][i] -= Mz[j][i];
            }
            Astar[m] = acc;
        }

        const double lhs = dot(Aeta, zeta, 1, 1, nt);
        const double rhs = dot(eta, Astar, 0, 0, nt + 1);
        const double neta = std::sqrt(dot(eta, eta, 0, 0, nt + 1));
        const double nzeta = std::sqrt(dot(zeta, zeta, 1, 1, nt));
        CHECK(std::fabs(lhs - rhs) <= 1e-8 * std::max(1e-30, neta * nzeta));
    }
}
