#include "acidinv/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace acidinv {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) +
                                    " must be strictly positive, got " +
                                    std::to_string(v));
    }
}

}  // namespace

void DimensionalParams::validate() const {
    require_positive(K1, "K1");
    require_positive(K2, "K2");
    require_positive(r1, "r1");
    require_positive(r2, "r2");
    require_positive(D_N2, "D_N2");
    require_positive(D_N3, "D_N3");
    require_positive(r3, "r3");
    require_positive(d3, "d3");
    require_positive(d1, "d1");
}

void NondimParams::validate() const {
    require_positive(delta1, "delta1");
    require_positive(rho2, "rho2");
    require_positive(D2, "D2");
    require_positive(delta3, "delta3");
}

NondimResult nondimensionalize(const DimensionalParams& p) {
    p.validate();
    NondimResult r;
    r.L0 = p.r3 * p.K2 / p.d3;
    r.params.delta1 = p.d1 * p.r3 * p.K2 / (p.d3 * p.r1);
    r.params.rho2 = p.r2 / p.r1;
    r.params.D2 = p.D_N2 / p.D_N3;
    r.params.delta3 = p.d3 / p.r1;
    return r;
}

ReactionValue reaction(double u1, double u2, double u3, const NondimParams& p) {
    ReactionValue f;
    f.f1 = u1 * (1.0 - u1) - p.delta1 * u1 * u3;
    f.f2 = p.rho2 * u2 * (1.0 - u2);
    f.f3 = p.delta3 * (u2 - u3);
    return f;
}

ReactionJacobian reaction_jacobian(double u1, double u2, double u3,
                                   const NondimParams& p) {
    ReactionJacobian j;
    j.d = {{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};
    j.d[0][0] = 1.0 - 2.0 * u1 - p.delta1 * u3;
    j.d[0][2] = -p.delta1 * u1;
    j.d[1][1] = p.rho2 * (1.0 - 2.0 * u2);
    j.d[2][1] = p.delta3;
    j.d[2][2] = -p.delta3;
    return j;
}

}  // namespace acidinv
