#ifndef ACIDINV_ERROR_ESTIMATE_HPP
#define ACIDINV_ERROR_ESTIMATE_HPP

#include <cmath>
#include <iosfwd>

#include "acidinv/forward.hpp"

namespace acidinv {

/// Residual-based a posteriori indicator of the forward FEM solution.
struct ErrorEstimate {
    /// Global estimator per field: max over time steps of the
    /// root-sum-square of the element indicators.
    std::array<double, 3> eta{};
    /// indicators[i][n-1][e]: field i, time step n (1..nt), element e.
    std::array<std::vector<std::vector<double>>, 3> indicators;
};

/// Element indicator from its two ingredients:
/// eta_K^2 = h^2 * ||R||_{L2(K)}^2 + h * sum of squared flux jumps.
inline double combine_indicator(double h, double resid_l2_sq,
                                double jump_sq_sum) {
    return std::sqrt(h * h * resid_l2_sq + h * jump_sq_sum);
}

/// Strong residual of the backward-Euler semi-discrete equations on each
/// element plus interelement flux jumps, per field and time step.
ErrorEstimate estimate_aposteriori(const StateTrajectory& traj,
                                   const NondimParams& p, const Mesh1D& mesh,
                                   const TimeGrid& tg);

/// CSV export: header field,step,element,indicator; per-field summary rows
/// use step = -1, element = -1 and carry the global estimator.
void export_error_csv(const ErrorEstimate& est, std::ostream& os);

}  // namespace acidinv

#endif
