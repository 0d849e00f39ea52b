#include "lenschain/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lenschain/errors.hpp"

namespace lenschain {

namespace {

void require_dim(std::size_t n) {
    if (n == 0 || n > kMaxDim) {
        throw DimensionError("matrix dimension " + std::to_string(n) + " outside [1, " +
                             std::to_string(kMaxDim) + "]");
    }
}

struct LU {
    std::vector<double> a;
    std::vector<std::size_t> perm;
    int sign = 1;
    bool exactly_singular = false;
};

// Doolittle LU with partial pivoting; never throws on singular input.
LU lu_decompose(const Matrix& m) {
    const std::size_t n = m.dim();
    LU lu{m.data(), std::vector<std::size_t>(n), 1, false};
    std::iota(lu.perm.begin(), lu.perm.end(), std::size_t{0});
    auto at = [&](std::size_t i, std::size_t j) -> double& { return lu.a[i * n + j]; };
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(at(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(at(i, k)) > best) {
                best = std::abs(at(i, k));
                piv = i;
            }
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
            std::swap(lu.perm[k], lu.perm[piv]);
            lu.sign = -lu.sign;
        }
        if (at(k, k) == 0.0) {
            lu.exactly_singular = true;
            continue;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = at(i, k) / at(k, k);
            at(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) at(i, j) -= f * at(k, j);
        }
    }
    return lu;
}

Vector lu_solve(const LU& lu, std::span<const double> v) {
    const std::size_t n = lu.perm.size();
    auto at = [&](std::size_t i, std::size_t j) { return lu.a[i * n + j]; };
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = v[lu.perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= at(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= at(i, j) * x[j];
        x[i] = s / at(i, i);
    }
    return x;
}

double lu_det(const LU& lu) {
    const std::size_t n = lu.perm.size();
    double d = lu.sign;
    for (std::size_t i = 0; i < n; ++i) d *= lu.a[i * n + i];
    return d;
}

Matrix minor_matrix(const Matrix& m, std::size_t skip_row, std::size_t skip_col) {
    const std::size_t n = m.dim();
    Matrix out(n - 1);
    for (std::size_t i = 0, r = 0; i < n; ++i) {
        if (i == skip_row) continue;
        for (std::size_t j = 0, c = 0; j < n; ++j) {
            if (j == skip_col) continue;
            out(r, c++) = m(i, j);
        }
        ++r;
    }
    return out;
}

Matrix cofactor_adjugate(const Matrix& m) {
    const std::size_t n = m.dim();
    if (n == 1) return Matrix::identity(1);
    Matrix adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = det(minor_matrix(m, i, j));
            // adj = transpose of the cofactor matrix
            adj(j, i) = ((i + j) % 2 == 0) ? c : -c;
        }
    }
    return adj;
}

}  // namespace

Matrix::Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) { require_dim(n); }

Matrix::Matrix(std::size_t n, std::vector<double> row_major) : n_(n), a_(std::move(row_major)) {
    require_dim(n);
    if (a_.size() != n * n) {
        throw DimensionError("expected " + std::to_string(n * n) + " entries, got " +
                             std::to_string(a_.size()));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    require_dim(n_);
    a_.reserve(n_ * n_);
    for (const auto& r : rows) {
        if (r.size() != n_) throw DimensionError("initializer rows must form a square matrix");
        a_.insert(a_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector Matrix::row(std::size_t i) const { return Vector(a_.begin() + i * n_, a_.begin() + (i + 1) * n_); }

Vector Matrix::col(std::size_t j) const {
    Vector v(n_);
    for (std::size_t i = 0; i < n_; ++i) v[i] = (*this)(i, j);
    return v;
}

void Matrix::set_col(std::size_t j, std::span<const double> v) {
    if (v.size() != n_) throw DimensionError("column length mismatch");
    for (std::size_t i = 0; i < n_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::norm_inf() const noexcept {
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double Matrix::max_abs() const noexcept {
    double best = 0.0;
    for (double x : a_) best = std::max(best, std::abs(x));
    return best;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (o.n_ != n_) throw DimensionError("dimension mismatch in +");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (o.n_ != n_) throw DimensionError("dimension mismatch in -");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

Matrix& Matrix::operator*=(double k) noexcept {
    for (double& x : a_) x *= k;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.n_ != b.n_) throw DimensionError("dimension mismatch in *");
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.n_) throw DimensionError("dimension mismatch in matrix-vector product");
    Vector y(a.n_, 0.0);
    for (std::size_t i = 0; i < a.n_; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.n_; ++k) s += a(i, k) * x[k];
        y[i] = s;
    }
    return y;
}

Vector add(std::span<const double> a, std::span<const double> b) {
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scale(std::span<const double> a, double k) {
    Vector out(a.begin(), a.end());
    for (double& x : out) x *= k;
    return out;
}

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
    Vector out(y.begin(), y.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * x[i];
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
    double best = 0.0;
    for (double x : a) best = std::max(best, std::abs(x));
    return best;
}

Vector unit_vector(std::size_t n, std::size_t k) {
    Vector e(n, 0.0);
    e.at(k) = 1.0;
    return e;
}

double det(const Matrix& m) {
    switch (m.dim()) {
        case 1:
            return m(0, 0);
        case 2:
            return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        default: {
            LU lu = lu_decompose(m);
            return lu_det(lu);
        }
    }
}

double singularity_scale(const Matrix& m) {
    return std::max(1.0, std::pow(m.norm_inf(), static_cast<double>(m.dim())));
}

bool is_singular_value(double det_value, const Matrix& m, const Tolerances& tol) {
    return std::abs(det_value) <= tol.sing * singularity_scale(m);
}

bool is_singular(const Matrix& m, const Tolerances& tol) { return is_singular_value(det(m), m, tol); }

Matrix adjugate(const Matrix& m) {
    if (m.dim() <= 4) return cofactor_adjugate(m);
    LU lu = lu_decompose(m);
    const double d = lu_det(lu);
    if (lu.exactly_singular || is_singular_value(d, m)) return cofactor_adjugate(m);
    const std::size_t n = m.dim();
    Matrix adj(n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector col = lu_solve(lu, unit_vector(n, j));
        for (std::size_t i = 0; i < n; ++i) adj(i, j) = d * col[i];
    }
    return adj;
}

Vector solve(const Matrix& m, std::span<const double> v, const Tolerances& tol) {
    if (v.size() != m.dim()) throw DimensionError("right-hand side length mismatch");
    LU lu = lu_decompose(m);
    const double d = lu_det(lu);
    if (lu.exactly_singular || is_singular_value(d, m, tol)) {
        throw SingularMatrix("matrix is singular (det = " + std::to_string(d) + ")");
    }
    return lu_solve(lu, v);
}

Matrix inverse(const Matrix& m, const Tolerances& tol) {
    LU lu = lu_decompose(m);
    const double d = lu_det(lu);
    if (lu.exactly_singular || is_singular_value(d, m, tol)) {
        throw SingularMatrix("matrix is singular (det = " + std::to_string(d) + ")");
    }
    const std::size_t n = m.dim();
    Matrix inv(n);
    for (std::size_t j = 0; j < n; ++j) inv.set_col(j, lu_solve(lu, unit_vector(n, j)));
    return inv;
}

double condition_estimate(const Matrix& m, const Tolerances& tol) {
    try {
        return m.norm_inf() * inverse(m, tol).norm_inf();
    } catch (const SingularMatrix&) {
        return std::numeric_limits<double>::infinity();
    }
}

RankSolve solve_rank_deficient(const Matrix& m, std::span<const double> rhs, double rank_tol) {
    const std::size_t n = m.dim();
    if (rhs.size() != n) throw DimensionError("right-hand side length mismatch");
    Matrix a = m;
    Vector y(rhs.begin(), rhs.end());
    const double thresh = rank_tol * std::max(1.0, m.max_abs());
    std::vector<std::size_t> col_order(n);
    std::iota(col_order.begin(), col_order.end(), std::size_t{0});
    std::size_t rank = 0;
    // reduced row echelon form with full pivoting
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        double best = 0.0;
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = k; j < n; ++j)
                if (std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    pr = i;
                    pc = j;
                }
        if (best <= thresh) break;
        for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pr, j));
        std::swap(y[k], y[pr]);
        for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, pc));
        std::swap(col_order[k], col_order[pc]);
        const double p = a(k, k);
        for (std::size_t j = 0; j < n; ++j) a(k, j) /= p;
        y[k] /= p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0.0) continue;
            const double f = a(i, k);
            for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(k, j);
            y[i] -= f * y[k];
        }
        ++rank;
    }
    RankSolve out;
    out.rank = rank;
    out.particular.assign(n, 0.0);
    for (std::size_t r = 0; r < rank; ++r) out.particular[col_order[r]] = y[r];
    for (std::size_t free = rank; free < n; ++free) {
        Vector v(n, 0.0);
        v[col_order[free]] = 1.0;
        for (std::size_t r = 0; r < rank; ++r) v[col_order[r]] = -a(r, free);
        const double nv = norm2(v);
        for (double& x : v) x /= nv;
        out.null_basis.push_back(std::move(v));
    }
    out.residual = norm_inf(sub(m * out.particular, rhs));
    return out;
}

std::vector<Vector> null_space(const Matrix& m, double rank_tol) {
    return solve_rank_deficient(m, Vector(m.dim(), 0.0), rank_tol).null_basis;
}

std::vector<Complex> solve_shifted_complex(const Matrix& a, Complex shift, std::span<const Complex> rhs) {
    const std::size_t n = a.dim();
    std::vector<Complex> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a(i, j) - (i == j ? shift : Complex{});
    std::vector<Complex> x(rhs.begin(), rhs.end());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) piv = i;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
            std::swap(x[k], x[piv]);
        }
        if (m[k * n + k] == Complex{}) m[k * n + k] = Complex{1e-300, 0.0};
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = m[i * n + k] / m[k * n + k];
            for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
            x[i] -= f * x[k];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        Complex s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m[i * n + j] * x[j];
        x[i] = s / m[i * n + i];
    }
    return x;
}

std::vector<Complex> eigenvector(const Matrix& a, Complex lambda) {
    const std::size_t n = a.dim();
    const Complex shift = lambda + Complex{1e-10 * (1.0 + std::abs(lambda)), 0.0};
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Complex{1.0 + 0.1 * static_cast<double>(i), 0.3};
    for (int it = 0; it < 4; ++it) {
        v = solve_shifted_complex(a, shift, v);
        double nv = 0.0;
        for (const Complex& c : v) nv += std::norm(c);
        nv = std::sqrt(nv);
        for (Complex& c : v) c /= nv;
    }
    return v;
}

}  // namespace lenschain
