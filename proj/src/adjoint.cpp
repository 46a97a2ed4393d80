#include "acidinv/adjoint.hpp"

#include <cstdio>
#include <ostream>

namespace acidinv {

AdjointTrajectory solve_adjoint(const NondimParams& p,
                                const StateTrajectory& traj,
                                const ObservationSet& obs, const Mesh1D& mesh,
                                const TimeGrid& tg) {
    const int nod = mesh.nod;
    const int nt = tg.nt;
    if (traj.nod != nod || traj.nt != nt || obs.nod != nod || obs.nt != nt) {
        throw std::invalid_argument("trajectory/observation grid mismatch");
    }
    const Tridiagonal M = assemble_mass(mesh);

    AdjointTrajectory adj;
    adj.nod = nod;
    adj.nt = nt;
    for (int i = 0; i < 3; ++i)
        adj.lambda[i].assign(nt + 1, GridFunction(nod, 0.0));

    // lambda[.][nt] = 0 is the final condition; sweep n = nt..1.
    State next{GridFunction(nod, 0.0), GridFunction(nod, 0.0),
               GridFunction(nod, 0.0)};
    for (int n = nt; n >= 1; --n) {
        // Coefficients frozen at the constraint's time level n; the data
        // source carries the misfit of level n.
        const State u = traj.level(n);
        BlockTridiagonal A =
            assemble_spatial(u, p, mesh, false).J.transposed();

        // System matrix M + tau*S^T.
        for (int j = 0; j < nod; ++j) {
            for (Mat3* blk : {&A.diag[j], &A.sub[j], &A.super[j]}) {
                for (int i = 0; i < 3; ++i)
                    for (int c = 0; c < 3; ++c) blk->m[i][c] *= tg.tau;
            }
            for (int i = 0; i < 3; ++i) {
                A.diag[j].m[i][i] += M.diag[j];
                if (j > 0) A.sub[j].m[i][i] += M.sub[j];
                if (j < nod - 1) A.super[j].m[i][i] += M.super[j];
            }
        }

        // rhs = M*lambda^n - w_n*M*(u3 - uhat3) in the lambda3 slot, where
        // w_n is the trapezoid weight of level n in the misfit.
        const double wn = (n == nt) ? 0.5 * tg.tau : tg.tau;
        GridFunction d(nod);
        for (int j = 0; j < nod; ++j)
            d[j] = traj.u[2][n][j] - obs.uhat3[n][j];
        const std::vector<double> Md = M.apply(d);
        std::vector<Vec3> rhs(nod, Vec3{});
        for (int j = 0; j < nod; ++j) {
            for (int i = 0; i < 3; ++i) {
                double mv = M.diag[j] * next[i][j];
                if (j > 0) mv += M.sub[j] * next[i][j - 1];
                if (j < nod - 1) mv += M.super[j] * next[i][j + 1];
                rhs[j][i] = mv;
            }
            rhs[j][2] -= wn * Md[j];
        }

        // Dirichlet-zero for lambda at x = 1.
        const int last = nod - 1;
        A.diag[last] = Mat3::identity();
        A.sub[last] = Mat3::zero();
        rhs[last] = Vec3{};

        std::vector<Vec3> sol;
        try {
            sol = solve_block_tridiagonal(A, rhs);
        } catch (const SingularSystemError& e) {
            throw std::runtime_error("singular adjoint system at time step " +
                                     std::to_string(n) + " (block row " +
                                     std::to_string(e.index) + ")");
        }
        for (int j = 0; j < nod; ++j)
            for (int i = 0; i < 3; ++i) adj.lambda[i][n - 1][j] = sol[j][i];
        for (int i = 0; i < 3; ++i) next[i] = adj.lambda[i][n - 1];
    }
    return adj;
}

void export_adjoint_csv(const AdjointTrajectory& adj, const Mesh1D& mesh,
                        const TimeGrid& tg, std::ostream& os) {
    os << "t,x,lambda1,lambda2,lambda3\n";
    char buf[64];
    for (int n = 0; n <= adj.nt; ++n) {
        for (int j = 0; j < adj.nod; ++j) {
            const double vals[5] = {tg.time(n), mesh.node(j),
                                    adj.lambda[0][n][j], adj.lambda[1][n][j],
                                    adj.lambda[2][n][j]};
            for (int c = 0; c < 5; ++c) {
                std::snprintf(buf, sizeof(buf), "%.17g", vals[c]);
                if (c) os << ',';
                os << buf;
            }
            os << '\n';
        }
    }
}

}  // namespace acidinv
