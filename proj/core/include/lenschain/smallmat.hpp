#pragma once

// Dense kernel for the small matrices (N <= 8) that appear throughout:
// products, determinants, adjugates, linear solves and spectra.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "lenschain/tolerances.hpp"

namespace lenschain {

using Vector = std::vector<double>;
using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDim = 8;

/// Square, row-major, real matrix.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n);  // zero-filled
    Matrix(std::size_t n, std::vector<double> row_major);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix zero(std::size_t n) { return Matrix(n); }

    std::size_t dim() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

    const std::vector<double>& data() const noexcept { return a_; }

    Vector row(std::size_t i) const;
    Vector col(std::size_t j) const;
    void set_col(std::size_t j, std::span<const double> v);

    Matrix transpose() const;
    double norm_inf() const noexcept;  // max absolute row sum
    double max_abs() const noexcept;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double k) noexcept;

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double k) { return a *= k; }
    friend Matrix operator*(double k, Matrix a) { return a *= k; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Vector operator*(const Matrix& a, std::span<const double> x);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

// vector helpers
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scale(std::span<const double> a, double k);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);  // alpha*x + y
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
Vector unit_vector(std::size_t n, std::size_t k);

double det(const Matrix& m);

/// The one singularity predicate used everywhere:
/// |det(M)| <= tol.sing * max(1, ||M||_inf^N).
bool is_singular(const Matrix& m, const Tolerances& tol = {});
bool is_singular_value(double det_value, const Matrix& m, const Tolerances& tol = {});
double singularity_scale(const Matrix& m);

/// adj(M) with adj(M) M = det(M) I; defined for singular M too.
Matrix adjugate(const Matrix& m);

/// Solves M x = v; throws SingularMatrix when the predicate fires.
Vector solve(const Matrix& m, std::span<const double> v, const Tolerances& tol = {});
Matrix inverse(const Matrix& m, const Tolerances& tol = {});

/// ||M||_inf ||M^-1||_inf, +inf when singular.
double condition_estimate(const Matrix& m, const Tolerances& tol = {});

/// Eigenvalues with multiplicity. Real eigenvalues come first (ascending),
/// then conjugate pairs ordered by real part, positive imaginary part first.
struct Spectrum {
    std::vector<Complex> eigenvalues;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    double spectral_radius() const noexcept;
    /// Real eigenvalues strictly greater than one (|Im| <= imag_tol * (1 + |lambda|)).
    int count_real_greater_than_one(double imag_tol = 1e-9) const noexcept;
    Complex product() const noexcept;
    /// min |lambda - target| over the spectrum.
    double distance_to(Complex target) const noexcept;
};

Spectrum eigenvalues(const Matrix& m);

/// Coefficients c_0..c_N of det(lambda I - M) = sum c_k lambda^k (c_N = 1),
/// via Faddeev-LeVerrier.
std::vector<double> characteristic_polynomial(const Matrix& m);

/// Eigenvalues of an upper-Hessenberg matrix by shifted QR (Francis double shift).
std::vector<Complex> hessenberg_qr_eigenvalues(Matrix h);

/// Householder reduction to upper-Hessenberg form (similarity transform).
Matrix hessenberg_reduce(Matrix m);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi; returns the
/// eigenvalues sorted descending.
Vector symmetric_eigenvalues(Matrix m);

/// Rank-revealing elimination (full pivoting). Pivots below
/// rank_tol * max(1, max|M_ij|) are treated as zero.
struct RankSolve {
    Vector particular;               // free variables set to zero
    std::vector<Vector> null_basis;  // unit-norm basis of null(M)
    std::size_t rank = 0;
    double residual = 0.0;           // ||M x - rhs||_inf for the particular solution
};
RankSolve solve_rank_deficient(const Matrix& m, std::span<const double> rhs, double rank_tol = 1e-9);

/// Unit-norm basis of null(M) from solve_rank_deficient.
std::vector<Vector> null_space(const Matrix& m, double rank_tol = 1e-9);

/// Solves a complex linear system (A - shift I) x = rhs by Gaussian elimination with
/// partial pivoting; used for inverse iteration.
std::vector<Complex> solve_shifted_complex(const Matrix& a, Complex shift, std::span<const Complex> rhs);

/// Eigenvector of `a` for the eigenvalue closest to `lambda`, by inverse iteration.
std::vector<Complex> eigenvector(const Matrix& a, Complex lambda);

}  // namespace lenschain
