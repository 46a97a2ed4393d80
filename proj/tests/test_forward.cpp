#include <cmath>
#include <random>
#include <sstream>

#include "acidinv/forward.hpp"
#include "doctest.h"

using namespace acidinv;

namespace {

const NondimParams kBaseline{0.5, 1.0, 4e-5, 1.0};

State constant_state(int nod, double u1, double u2, double u3) {
    return {GridFunction(nod, u1), GridFunction(nod, u2),
            GridFunction(nod, u3)};
}

InitialCondition equilibrium_ic(int nod) {
    InitialCondition ic;
    ic.u1 = GridFunction(nod, 1.0);
    ic.u2 = GridFunction(nod, 0.0);
    ic.u3 = GridFunction(nod, 0.0);
    return ic;
}

}  // namespace

TEST_CASE("time grid validation") {
    const TimeGrid tg = TimeGrid::make(0.5, 20.0);
    CHECK(tg.nt == 40);
    CHECK_THROWS_AS(TimeGrid::make(0.3, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::make(-0.1, 20.0), std::invalid_argument);
}

TEST_CASE("default initial condition") {
    const Mesh1D mesh = Mesh1D::uniform(11);
    const InitialCondition ic = default_initial_condition(mesh, 0.1);
    CHECK(ic.u1[0] == doctest::Approx(0.0));
    CHECK(ic.u2[0] == doctest::Approx(1.0));
    CHECK(ic.u3[0] == doctest::Approx(1.0));
    CHECK(ic.u1[10] == 1.0);
    CHECK(ic.u2[10] == 0.0);
    CHECK(ic.u3[10] == 0.0);
    // node 1 sits at x = 0.1 = x0
    CHECK(ic.u2[1] == doctest::Approx(std::exp(-1.0)));

    CHECK_THROWS_AS(default_initial_condition(mesh, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(default_initial_condition(mesh, 1.5),
                    std::invalid_argument);
}

TEST_CASE("step residual vanishes at the equilibrium") {
    const Mesh1D mesh = Mesh1D::uniform(9);
    const State eq = constant_state(9, 1.0, 0.0, 0.0);
    const StepSystem sys = step_residual(eq, eq, kBaseline, mesh, 0.5);
    for (const Vec3& r : sys.residual)
        for (double c : r) CHECK(std::fabs(c) < 1e-15);
}

TEST_CASE("step residual at tau = 0 is the mass-matrix difference") {
    const Mesh1D mesh = Mesh1D::uniform(7);
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    State Un = constant_state(7, 0, 0, 0), Up = Un;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 7; ++j) {
            Un[i][j] = u(gen);
            Up[i][j] = u(gen);
        }
    ForwardOptions opts;
    opts.skip_dirichlet = true;
    const StepSystem sys = step_residual(Un, Up, kBaseline, mesh, 0.0, opts);
    const Tridiagonal M = assemble_mass(mesh);
    for (int i = 0; i < 3; ++i) {
        GridFunction d(7);
        for (int j = 0; j < 7; ++j) d[j] = Un[i][j] - Up[i][j];
        const std::vector<double> Md = M.apply(d);
        for (int j = 0; j < 7; ++j)
            CHECK(sys.residual[j][i] == doctest::Approx(Md[j]).epsilon(1e-14));
    }
}

TEST_CASE("step jacobian matches finite differences of the residual") {
    const Mesh1D mesh = Mesh1D::uniform(6);
    const double tau = 0.5;
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    State Un = constant_state(6, 0, 0, 0), Up = Un;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 6; ++j) {
            Un[i][j] = u(gen);
            Up[i][j] = u(gen);
        }
    const NondimParams p{4.0, 1.3, 0.2, 2.0};  // sizable D2 to exercise coupling
    const StepSystem sys = step_residual(Un, Up, p, mesh, tau);

    const double step = 1e-6;
    for (int k = 0; k < 6; ++k) {
        for (int ci = 0; ci < 3; ++ci) {
            State Uplus = Un, Uminus = Un;
            Uplus[ci][k] += step;
            Uminus[ci][k] -= step;
            const StepSystem sp = step_residual(Uplus, Up, p, mesh, tau);
            const StepSystem sm = step_residual(Uminus, Up, p, mesh, tau);
            for (int j = 0; j < 6; ++j) {
                for (int ri = 0; ri < 3; ++ri) {
                    const double fd =
                        (sp.residual[j][ri] - sm.residual[j][ri]) / (2 * step);
                    double a = 0.0;
                    if (k == j) a = sys.jacobian.diag[j].m[ri][ci];
                    else if (k == j - 1) a = sys.jacobian.sub[j].m[ri][ci];
                    else if (k == j + 1) a = sys.jacobian.super[j].m[ri][ci];
                    const double scale = std::max({1.0, std::fabs(fd)});
                    CHECK(std::fabs(a - fd) / scale < 1e-5);
                }
            }
        }
    }
}

TEST_CASE("equilibrium initial data stays constant") {
    const Mesh1D mesh = Mesh1D::uniform(41);
    const TimeGrid tg = TimeGrid::make(0.5, 20.0);
    const StateTrajectory traj =
        solve_forward(kBaseline, equilibrium_ic(41), mesh, tg);
    for (int n = 0; n <= tg.nt; ++n)
        for (int j = 0; j < 41; ++j) {
            CHECK(std::fabs(traj.u[0][n][j] - 1.0) < 1e-12);
            CHECK(std::fabs(traj.u[1][n][j]) < 1e-12);
            CHECK(std::fabs(traj.u[2][n][j]) < 1e-12);
        }
}

TEST_CASE("Dirichlet values are bitwise exact at every step") {
    const Mesh1D mesh = Mesh1D::uniform(51);
    const TimeGrid tg = TimeGrid::make(0.5, 10.0);
    const InitialCondition ic = default_initial_condition(mesh, 0.1);
    const StateTrajectory traj = solve_forward(kBaseline, ic, mesh, tg);
    for (int n = 0; n <= tg.nt; ++n) {
        CHECK(traj.u[0][n][50] == 1.0);
        CHECK(traj.u[1][n][50] == 0.0);
        CHECK(traj.u[2][n][50] == 0.0);
    }
}

TEST_CASE("incompatible initial condition is rejected") {
    const Mesh1D mesh = Mesh1D::uniform(11);
    const TimeGrid tg = TimeGrid::make(0.5, 1.0);
    InitialCondition ic = default_initial_condition(mesh, 0.1);
    ic.u1[10] = 0.5;
    CHECK_THROWS_AS(solve_forward(kBaseline, ic, mesh, tg),
                    std::invalid_argument);
}

TEST_CASE("Newton failure reports the time step") {
    const Mesh1D mesh = Mesh1D::uniform(21);
    const TimeGrid tg = TimeGrid::make(0.5, 2.0);
    const InitialCondition ic = default_initial_condition(mesh, 0.1);
    ForwardOptions opts;
    opts.newton.max_iter = 0;
    try {
        solve_forward(kBaseline, ic, mesh, tg, opts);
        FAIL("expected StepFailureError");
    } catch (const StepFailureError& e) {
        CHECK(e.step == 1);
        CHECK(e.residual_norm > 0.0);
    }
}

TEST_CASE("spatially-constant mode tracks the scalar ODE") {
    // Diffusion and Dirichlet handling off: every node must follow the
    // pointwise implicit Euler recursion of the reaction ODEs.
    const int nod = 17;
    const Mesh1D mesh = Mesh1D::uniform(nod);
    const TimeGrid tg = TimeGrid::make(0.25, 5.0);
    const NondimParams p{2.0, 1.5, 4e-5, 3.0};
    InitialCondition ic;
    ic.u1 = GridFunction(nod, 0.3);
    ic.u2 = GridFunction(nod, 0.4);
    ic.u3 = GridFunction(nod, 0.2);
    ForwardOptions opts;
    opts.disable_diffusion = true;
    opts.skip_dirichlet = true;
    const StateTrajectory traj = solve_forward(p, ic, mesh, tg, opts);

    // Reference: scalar implicit Euler with Newton on the 3-ODE system.
    double v[3] = {0.3, 0.4, 0.2};
    for (int n = 1; n <= tg.nt; ++n) {
        double w[3] = {v[0], v[1], v[2]};
        for (int it = 0; it < 50; ++it) {
            const ReactionValue f = reaction(w[0], w[1], w[2], p);
            const double F[3] = {w[0] - v[0] - tg.tau * f.f1,
                                 w[1] - v[1] - tg.tau * f.f2,
                                 w[2] - v[2] - tg.tau * f.f3};
            const ReactionJacobian df = reaction_jacobian(w[0], w[1], w[2], p);
            // Solve (I - tau*df) delta = -F by dense 3x3 elimination.
            double A[3][4];
            for (int i = 0; i < 3; ++i) {
                for (int c = 0; c < 3; ++c)
                    A[i][c] = (i == c ? 1.0 : 0.0) - tg.tau * df.d[i][c];
                A[i][3] = -F[i];
            }
            for (int k = 0; k < 3; ++k) {
                int piv = k;
                for (int i = k + 1; i < 3; ++i)
                    if (std::fabs(A[i][k]) > std::fabs(A[piv][k])) piv = i;
                for (int c = 0; c < 4; ++c) std::swap(A[piv][c], A[k][c]);
                for (int i = k + 1; i < 3; ++i) {
                    const double fct = A[i][k] / A[k][k];
                    for (int c = k; c < 4; ++c) A[i][c] -= fct * A[k][c];
                }
            }
            double delta[3];
            for (int i = 2; i >= 0; --i) {
                double s = A[i][3];
                for (int c = i + 1; c < 3; ++c) s -= A[i][c] * delta[c];
                delta[i] = s / A[i][i];
            }
            double maxd = 0.0;
            for (int i = 0; i < 3; ++i) {
                w[i] += delta[i];
                maxd = std::max(maxd, std::fabs(delta[i]));
            }
            if (maxd < 1e-14) break;
        }
        for (int i = 0; i < 3; ++i) v[i] = w[i];
        for (int j = 0; j < nod; ++j)
            for (int i = 0; i < 3; ++i)
                CHECK(std::fabs(traj.u[i][n][j] - v[i]) < 1e-8);
    }
}

TEST_CASE("Newton convergence is superlinear near the solution") {
    const Mesh1D mesh = Mesh1D::uniform(201);
    const TimeGrid tg = TimeGrid::make(0.5, 5.0);
    const InitialCondition ic = default_initial_condition(mesh, 0.1);
    std::vector<std::vector<double>> history;
    ForwardOptions opts;
    opts.newton_residual_history = &history;
    solve_forward(NondimParams{12.5, 1.0, 4e-5, 1.0}, ic, mesh, tg, opts);
    int checked = 0;
    for (const auto& h : history) {
        for (std::size_t k = 0; k + 1 < h.size(); ++k) {
            // Asymptotic window: small enough for the quadratic regime,
            // next residual still above the roundoff floor.
            if (h[k] < 1e-4 && h[k + 1] > 1e-13) {
                CHECK(h[k + 1] < std::pow(h[k], 1.5));
                ++checked;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("refinement in tau and h is at least first order") {
    const NondimParams p{12.5, 1.0, 4e-5, 1.0};
    auto final_u3 = [&](int nod, double tau) {
        const Mesh1D mesh = Mesh1D::uniform(nod);
        const TimeGrid tg = TimeGrid::make(tau, 10.0);
        const InitialCondition ic = default_initial_condition(mesh, 0.1);
        const StateTrajectory traj = solve_forward(p, ic, mesh, tg);
        return traj.u[2][tg.nt];
    };
    const GridFunction a = final_u3(51, 0.5);
    const GridFunction b = final_u3(101, 0.25);
    const GridFunction c = final_u3(201, 0.125);
    double e1 = 0.0, e2 = 0.0;
    for (int j = 0; j < 51; ++j) {
        e1 = std::max(e1, std::fabs(a[j] - b[2 * j]));
        e2 = std::max(e2, std::fabs(b[2 * j] - c[4 * j]));
    }
    CHECK(e2 < e1);
    CHECK(e1 / e2 > 1.7);  // observed order >= 1
}

TEST_CASE("trajectory CSV export shape") {
    const Mesh1D mesh = Mesh1D::uniform(5);
    const TimeGrid tg = TimeGrid::make(0.5, 1.0);
    const StateTrajectory traj =
        solve_forward(kBaseline, equilibrium_ic(5), mesh, tg);
    std::ostringstream os;
    export_trajectory_csv(traj, mesh, tg, os);
    std::istringstream is(os.str());
    std::string line;
    int rows = 0;
    CHECK(std::getline(is, line));
    CHECK(line == "t,x,u1,u2,u3");
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 5 * (tg.nt + 1));
}
