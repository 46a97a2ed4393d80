#ifndef ACIDINV_FEM_HPP
#define ACIDINV_FEM_HPP

#include <array>
#include <stdexcept>
#include <vector>

namespace acidinv {

/// Uniform mesh of [0,1] with linear (hat) shape functions.
struct Mesh1D {
    int nod;   ///< node count, >= 3
    double h;  ///< element length 1/(nod-1)

    static Mesh1D uniform(int nod);
    double node(int j) const { return static_cast<double>(j) * h; }
    int num_elements() const { return nod - 1; }
};

/// Nodal values of a piecewise-linear function on a Mesh1D.
using GridFunction = std::vector<double>;

using Vec3 = std::array<double, 3>;

/// Dense 3x3 block used by the coupled system matrices.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 zero() { return Mat3{}; }
    static Mat3 identity();
    Mat3 transposed() const;
    Vec3 apply(const Vec3& x) const;
    Mat3& operator+=(const Mat3& o);
};

/// Scalar tridiagonal matrix (mass, stiffness). sub[0] and super[n-1] are
/// unused and kept at zero.
struct Tridiagonal {
    int n = 0;
    std::vector<double> sub, diag, super;

    explicit Tridiagonal(int n_ = 0)
        : n(n_), sub(n_, 0.0), diag(n_, 0.0), super(n_, 0.0) {}

    std::vector<double> apply(const std::vector<double>& x) const;
};

/// Block tridiagonal matrix with 3x3 blocks, same diagonal convention as
/// Tridiagonal.
struct BlockTridiagonal {
    int n = 0;
    std::vector<Mat3> sub, diag, super;

    explicit BlockTridiagonal(int n_ = 0)
        : n(n_), sub(n_), diag(n_), super(n_) {}

    std::vector<Vec3> apply(const std::vector<Vec3>& x) const;
    BlockTridiagonal transposed() const;
};

struct SingularSystemError : std::runtime_error {
    int index;
    explicit SingularSystemError(int idx);
};

/// Consistent mass matrix of the hat basis: diag 2h/3 (h/3 at the ends),
/// off-diagonals h/6.
Tridiagonal assemble_mass(const Mesh1D& mesh);

/// Stiffness matrix with piecewise-linear weight w: entry (j,k) equals
/// the integral of w(x) phi_j'(x) phi_k'(x). The per-element weight is the
/// endpoint average, which is exact for linear w against the constant
/// element gradients.
Tridiagonal assemble_weighted_stiffness(const Mesh1D& mesh,
                                        const GridFunction& w);

/// Block Thomas elimination. Throws SingularSystemError with the failing
/// block row if a pivot block cannot be factorized.
std::vector<Vec3> solve_block_tridiagonal(const BlockTridiagonal& A,
                                          const std::vector<Vec3>& b);

/// 3-point Gauss-Legendre rule on [0,1]: exact for polynomials up to
/// degree 5, which covers every product of three linear factors appearing
/// in the weak forms.
struct GaussRule3 {
    std::array<double, 3> pts;
    std::array<double, 3> wts;
    GaussRule3();
};

}  // namespace acidinv

#endif
