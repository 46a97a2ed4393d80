#ifndef ACIDINV_MODEL_HPP
#define ACIDINV_MODEL_HPP

#include <array>

namespace acidinv {

/// Dimensional parameters of the acid-mediated invasion model.
/// Units: carrying capacities in cells/cm^3, rates in 1/s, diffusion in
/// cm^2/s, acid production in M cm^3/(cell s), death rate in 1/(M s).
struct DimensionalParams {
    double K1;    ///< carrying capacity, normal tissue
    double K2;    ///< carrying capacity, neoplastic tissue
    double r1;    ///< growth rate, normal tissue
    double r2;    ///< growth rate, neoplastic tissue
    double D_N2;  ///< tumor diffusion constant
    double D_N3;  ///< H+ diffusion constant
    double r3;    ///< acid production rate
    double d3;    ///< acid reabsorption rate
    double d1;    ///< acid-induced death rate of normal tissue

    /// Throws std::invalid_argument if any field is not strictly positive.
    void validate() const;
};

/// The four dimensionless groups driving the nondimensional model.
struct NondimParams {
    double delta1;  ///< destructive influence of excess H+ on normal tissue
    double rho2;    ///< tumor/normal growth-rate ratio
    double D2;      ///< tumor/H+ diffusion ratio
    double delta3;  ///< reabsorption rate over normal growth rate

    void validate() const;
};

/// Pointwise reaction rates (f1, f2, f3) of the nondimensional system.
struct ReactionValue {
    double f1;
    double f2;
    double f3;
};

/// 3x3 Jacobian d f_i / d u_j of the reaction terms. The coupling structure
/// leaves entries (0,1), (1,0), (1,2), (2,0) identically zero.
struct ReactionJacobian {
    std::array<std::array<double, 3>, 3> d;
};

struct NondimResult {
    NondimParams params;
    double L0;  ///< acid concentration scale r3*K2/d3 [M]
};

/// Maps dimensional parameters onto the four dimensionless groups and the
/// acid scale L0.
NondimResult nondimensionalize(const DimensionalParams& p);

/// Reaction terms at a point:
///   f1 = u1(1-u1) - delta1*u1*u3
///   f2 = rho2*u2(1-u2)
///   f3 = delta3*(u2-u3)
ReactionValue reaction(double u1, double u2, double u3, const NondimParams& p);

/// Exact Jacobian of reaction() at a point.
ReactionJacobian reaction_jacobian(double u1, double u2, double u3,
                                   const NondimParams& p);

}  // namespace acidinv

#endif
