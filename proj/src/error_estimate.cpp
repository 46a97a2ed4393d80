#include "acidinv/error_estimate.hpp"

#include <cstdio>
#include <ostream>

namespace acidinv {

ErrorEstimate estimate_aposteriori(const StateTrajectory& traj,
                                   const NondimParams& p, const Mesh1D& mesh,
                                   const TimeGrid& tg) {
    if (traj.nod != mesh.nod || traj.nt != tg.nt) {
        throw std::invalid_argument("trajectory grid mismatch");
    }
    static const GaussRule3 gauss;
    const int nod = mesh.nod;
    const int ne = mesh.num_elements();
    const double h = mesh.h;

    ErrorEstimate est;
    for (int i = 0; i < 3; ++i)
        est.indicators[i].assign(tg.nt, std::vector<double>(ne, 0.0));

    std::array<std::vector<double>, 3> grad;   // element gradients at level n
    std::array<std::vector<double>, 3> jumps;  // squared flux jump per node
    for (int i = 0; i < 3; ++i) {
        grad[i].assign(ne, 0.0);
        jumps[i].assign(nod, 0.0);
    }

    for (int n = 1; n <= tg.nt; ++n) {
        for (int i = 0; i < 3; ++i)
            for (int e = 0; e < ne; ++e)
                grad[i][e] = (traj.u[i][n][e + 1] - traj.u[i][n][e]) / h;

        // Diffusive flux jumps at interior nodes. Field 1 carries no flux;
        // the field-2 flux coefficient D2*(1-u1) is continuous, so only the
        // gradient jumps.
        for (int j = 1; j < nod - 1; ++j) {
            jumps[0][j] = 0.0;
            const double a2 = p.D2 * (1.0 - traj.u[0][n][j]);
            const double j2 = a2 * (grad[1][j] - grad[1][j - 1]);
            jumps[1][j] = j2 * j2;
            const double j3 = grad[2][j] - grad[2][j - 1];
            jumps[2][j] = j3 * j3;
        }

        for (int e = 0; e < ne; ++e) {
            const int l = e, r = e + 1;
            double rsq[3] = {0.0, 0.0, 0.0};
            for (int q = 0; q < 3; ++q) {
                const double s = gauss.pts[q];
                const double dx = h * gauss.wts[q];
                double u[3], ut[3];
                for (int i = 0; i < 3; ++i) {
                    u[i] = traj.u[i][n][l] * (1.0 - s) + traj.u[i][n][r] * s;
                    const double uprev = traj.u[i][n - 1][l] * (1.0 - s) +
                                         traj.u[i][n - 1][r] * s;
                    ut[i] = (u[i] - uprev) / tg.tau;
                }
                const ReactionValue f = reaction(u[0], u[1], u[2], p);
                const double r1 = ut[0] - f.f1;
                // -d/dx(D2(1-u1)u2') = D2*u1'*u2' for linear elements.
                const double r2 =
                    ut[1] - f.f2 + p.D2 * grad[0][e] * grad[1][e];
                const double r3 = ut[2] - f.f3;
                rsq[0] += dx * r1 * r1;
                rsq[1] += dx * r2 * r2;
                rsq[2] += dx * r3 * r3;
            }
            for (int i = 0; i < 3; ++i) {
                double jsq = 0.0;
                if (l >= 1) jsq += jumps[i][l];
                if (r <= nod - 2) jsq += jumps[i][r];
                est.indicators[i][n - 1][e] = combine_indicator(h, rsq[i], jsq);
            }
        }
    }

    for (int i = 0; i < 3; ++i) {
        double global = 0.0;
        for (int n = 0; n < tg.nt; ++n) {
            double ssq = 0.0;
            for (int e = 0; e < ne; ++e) {
                const double v = est.indicators[i][n][e];
                ssq += v * v;
            }
            global = std::max(global, std::sqrt(ssq));
        }
        est.eta[i] = global;
    }
    return est;
}

void export_error_csv(const ErrorEstimate& est, std::ostream& os) {
    os << "field,step,element,indicator\n";
    char buf[64];
    for (int i = 0; i < 3; ++i) {
        for (std::size_t n = 0; n < est.indicators[i].size(); ++n) {
            for (std::size_t e = 0; e < est.indicators[i][n].size(); ++e) {
                std::snprintf(buf, sizeof(buf), "%.17g",
                              est.indicators[i][n][e]);
                os << (i + 1) << ',' << (n + 1) << ',' << e << ',' << buf
                   << '\n';
            }
        }
    }
    for (int i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", est.eta[i]);
        os << (i + 1) << ",-1,-1," << buf << '\n';
    }
}

}  // namespace acidinv
