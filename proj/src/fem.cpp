#include "acidinv/fem.hpp"

#include <cmath>
#include <string>

namespace acidinv {

Mesh1D Mesh1D::uniform(int nod) {
    if (nod < 3) {
        throw std::invalid_argument("Mesh1D needs at least 3 nodes, got " +
                                    std::to_string(nod));
    }
    Mesh1D m;
    m.nod = nod;
    m.h = 1.0 / static_cast<double>(nod - 1);
    return m;
}

Mat3 Mat3::identity() {
    Mat3 r;
    r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
    return r;
}

Mat3 Mat3::transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
}

Vec3 Mat3::apply(const Vec3& x) const {
    Vec3 y{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) y[i] += m[i][j] * x[j];
    return y;
}

Mat3& Mat3::operator+=(const Mat3& o) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] += o.m[i][j];
    return *this;
}

std::vector<double> Tridiagonal::apply(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += sub[i] * x[i - 1];
        if (i < n - 1) s += super[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

std::vector<Vec3> BlockTridiagonal::apply(const std::vector<Vec3>& x) const {
    std::vector<Vec3> y(n, Vec3{});
    for (int i = 0; i < n; ++i) {
        Vec3 s = diag[i].apply(x[i]);
        if (i > 0) {
            Vec3 t = sub[i].apply(x[i - 1]);
            for (int c = 0; c < 3; ++c) s[c] += t[c];
        }
        if (i < n - 1) {
            Vec3 t = super[i].apply(x[i + 1]);
            for (int c = 0; c < 3; ++c) s[c] += t[c];
        }
        y[i] = s;
    }
    return y;
}

BlockTridiagonal BlockTridiagonal::transposed() const {
    BlockTridiagonal r(n);
    for (int i = 0; i < n; ++i) {
        r.diag[i] = diag[i].transposed();
        if (i > 0) r.sub[i] = super[i - 1].transposed();
        if (i < n - 1) r.super[i] = sub[i + 1].transposed();
    }
    return r;
}

SingularSystemError::SingularSystemError(int idx)
    : std::runtime_error("singular block pivot at row " + std::to_string(idx)),
      index(idx) {}

Tridiagonal assemble_mass(const Mesh1D& mesh) {
    Tridiagonal M(mesh.nod);
    const double h = mesh.h;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        M.diag[e] += h / 3.0;
        M.diag[e + 1] += h / 3.0;
        M.super[e] += h / 6.0;
        M.sub[e + 1] += h / 6.0;
    }
    return M;
}

Tridiagonal assemble_weighted_stiffness(const Mesh1D& mesh,
                                        const GridFunction& w) {
    if (static_cast<int>(w.size()) != mesh.nod) {
        throw std::invalid_argument("weight length does not match mesh");
    }
    Tridiagonal K(mesh.nod);
    const double h = mesh.h;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double we = 0.5 * (w[e] + w[e + 1]);
        const double k = we / h;
        K.diag[e] += k;
        K.diag[e + 1] += k;
        K.super[e] -= k;
        K.sub[e + 1] -= k;
    }
    return K;
}

namespace {

// In-place LU with partial pivoting of a 3x3 block; perm maps pivoted rows.
struct Lu3 {
    Mat3 lu;
    std::array<int, 3> perm;
};

bool lu3_factor(const Mat3& a, Lu3& out) {
    out.lu = a;
    out.perm = {0, 1, 2};
    auto& m = out.lu.m;
    double scale = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::fabs(m[i][j]));
    if (scale == 0.0) return false;
    for (int k = 0; k < 3; ++k) {
        int p = k;
        for (int i = k + 1; i < 3; ++i)
            if (std::fabs(m[i][k]) > std::fabs(m[p][k])) p = i;
        if (p != k) {
            std::swap(m[p], m[k]);
            std::swap(out.perm[p], out.perm[k]);
        }
        if (std::fabs(m[k][k]) <= 1e-14 * scale) return false;
        for (int i = k + 1; i < 3; ++i) {
            m[i][k] /= m[k][k];
            for (int j = k + 1; j < 3; ++j) m[i][j] -= m[i][k] * m[k][j];
        }
    }
    return true;
}

Vec3 lu3_solve(const Lu3& f, const Vec3& b) {
    const auto& m = f.lu.m;
    Vec3 y;
    for (int i = 0; i < 3; ++i) y[i] = b[f.perm[i]];
    for (int i = 1; i < 3; ++i)
        for (int j = 0; j < i; ++j) y[i] -= m[i][j] * y[j];
    for (int i = 2; i >= 0; --i) {
        for (int j = i + 1; j < 3; ++j) y[i] -= m[i][j] * y[j];
        y[i] /= m[i][i];
    }
    return y;
}

Mat3 lu3_solve_mat(const Lu3& f, const Mat3& b) {
    // Solves F X = B columnwise.
    Mat3 x;
    for (int c = 0; c < 3; ++c) {
        Vec3 col{b.m[0][c], b.m[1][c], b.m[2][c]};
        Vec3 s = lu3_solve(f, col);
        for (int r = 0; r < 3; ++r) x.m[r][c] = s[r];
    }
    return x;
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

}  // namespace

std::vector<Vec3> solve_block_tridiagonal(const BlockTridiagonal& A,
                                          const std::vector<Vec3>& b) {
    const int n = A.n;
    if (static_cast<int>(b.size()) != n) {
        throw std::invalid_argument("rhs length does not match matrix");
    }
    // Forward sweep: C_i = D_i^{-1} S_i, z_i = D_i^{-1} rhs_i with
    // D_i = diag_i - sub_i C_{i-1}.
    std::vector<Mat3> C(n);
    std::vector<Vec3> z(n);
    Mat3 D = A.diag.empty() ? Mat3{} : A.diag[0];
    Vec3 r = b.empty() ? Vec3{} : b[0];
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            D = A.diag[i];
            Mat3 sc = mat_mul(A.sub[i], C[i - 1]);
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) D.m[a][c] -= sc.m[a][c];
            Vec3 sz = A.sub[i].apply(z[i - 1]);
            r = b[i];
            for (int c = 0; c < 3; ++c) r[c] -= sz[c];
        }
        Lu3 f;
        if (!lu3_factor(D, f)) throw SingularSystemError(i);
        z[i] = lu3_solve(f, r);
        if (i < n - 1) C[i] = lu3_solve_mat(f, A.super[i]);
    }
    // Back substitution.
    std::vector<Vec3> x(n);
    x[n - 1] = z[n - 1];
    for (int i = n - 2; i >= 0; --i) {
        Vec3 cx = C[i].apply(x[i + 1]);
        for (int c = 0; c < 3; ++c) x[i][c] = z[i][c] - cx[c];
    }
    return x;
}

GaussRule3::GaussRule3() {
    const double s = std::sqrt(3.0 / 5.0);
    pts = {0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)};
    wts = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
}

}  // namespace acidinv
