#ifndef ACIDINV_ADJOINT_HPP
#define ACIDINV_ADJOINT_HPP

#include <iosfwd>

#include "acidinv/objective.hpp"

namespace acidinv {

/// Nodal values of the adjoint fields (lambda1, lambda2, lambda3), solved
/// backward in time with final condition lambda(T) = 0 and lambda = 0 at
/// the Dirichlet boundary x = 1.
struct AdjointTrajectory {
    int nod = 0;
    int nt = 0;
    /// lambda[i][n][j]: field i, time level n, node j.
    std::array<std::vector<GridFunction>, 3> lambda;

    /// gamma(x) = lambda(x, 0), the multiplier of the initial condition.
    State gamma() const { return {lambda[0][0], lambda[1][0], lambda[2][0]}; }
};

/// Backward sweep: for n = nt..1 solve the linear block system
/// M(lambda^{n-1} - lambda^n) + tau*(S(u^{n-1})^T lambda^{n-1} + src) = 0,
/// where S is the spatial Jacobian of the forward weak operator and the
/// source enters the lambda3 equation as M(u3^{n-1} - uhat3^{n-1}).
AdjointTrajectory solve_adjoint(const NondimParams& p,
                                const StateTrajectory& traj,
                                const ObservationSet& obs, const Mesh1D& mesh,
                                const TimeGrid& tg);

/// CSV export: header t,x,lambda1,lambda2,lambda3.
void export_adjoint_csv(const AdjointTrajectory& adj, const Mesh1D& mesh,
                        const TimeGrid& tg, std::ostream& os);

}  // namespace acidinv

#endif
