#pragma once

// Piecewise-affine continuous map
//   x' = mu b + A_L x  (s <= 0),   x' = mu b + A_R x  (s >= 0),   s = e1^T x.

#include <span>
#include <string>

#include "lenschain/smallmat.hpp"
#include "lenschain/symseq.hpp"
#include "lenschain/tolerances.hpp"

namespace lenschain {

class PwaMap {
public:
    /// Throws ContinuityViolated unless columns 2..N of A_L and A_R are
    /// bit-identical, DimensionError on size mismatch.
    PwaMap(Matrix a_left, Matrix a_right, Vector b);

    std::size_t dim() const noexcept { return b_.size(); }
    const Matrix& left() const noexcept { return a_left_; }
    const Matrix& right() const noexcept { return a_right_; }
    const Matrix& branch(Symbol s) const noexcept { return s == Symbol::L ? a_left_ : a_right_; }
    const Vector& b() const noexcept { return b_; }

    /// f_mu(x); the L branch is used when s <= 0 (both agree at s = 0).
    Vector evaluate(double mu, std::span<const double> x) const;

    /// mu b + A_symbol x, regardless of the sign of s.
    Vector apply_branch(double mu, Symbol symbol, std::span<const double> x) const;

    /// det(A_L) det(A_R) > 0.
    bool is_homeomorphism() const;

private:
    Matrix a_left_;
    Matrix a_right_;
    Vector b_;
};

/// rho^T = e1^T adj(I - A_L) = e1^T adj(I - A_R). Throws ContinuityViolated if
/// the two rows differ by more than `rel_tol` relative to their size.
Vector rho(const PwaMap& map, double rel_tol = 1e-10);

struct FixedPointReport {
    Symbol side = Symbol::L;
    Vector point;
    double s_star = 0.0;
    /// s_star has the sign of the side (or lies within the on-manifold band).
    bool admissible = false;
    bool on_manifold = false;
    double det_IminusA = 0.0;
};

/// x*(i) = mu (I - A_i)^{-1} b. Throws UnitMultiplier when I - A_i is singular.
FixedPointReport fixed_point(const PwaMap& map, double mu, Symbol side, const Tolerances& tol = {});

enum class BorderCollision { Persistence, NonsmoothFold, Degenerate };

std::string to_string(BorderCollision c);

/// Feigin parity rule on the number of real multipliers > 1 of A_L and A_R.
BorderCollision classify_border_collision(const PwaMap& map, const Tolerances& tol = {});

}  // namespace lenschain
