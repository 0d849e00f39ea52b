#include "lenschain/pwamap.hpp"

#include <cmath>

#include "lenschain/errors.hpp"

namespace lenschain {

PwaMap::PwaMap(Matrix a_left, Matrix a_right, Vector b)
    : a_left_(std::move(a_left)), a_right_(std::move(a_right)), b_(std::move(b)) {
    const std::size_t n = b_.size();
    if (a_left_.dim() != n || a_right_.dim() != n) {
        throw DimensionError("A_L, A_R and b must share the dimension N");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 1; j < n; ++j) {
            if (a_left_(i, j) != a_right_(i, j)) {
                throw ContinuityViolated("A_L and A_R differ at entry (" + std::to_string(i + 1) + ", " +
                                         std::to_string(j + 1) + "); only the first column may differ");
            }
        }
    }
}

Vector PwaMap::apply_branch(double mu, Symbol symbol, std::span<const double> x) const {
    Vector y = branch(symbol) * x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += mu * b_[i];
    return y;
}

Vector PwaMap::evaluate(double mu, std::span<const double> x) const {
    return apply_branch(mu, x[0] <= 0.0 ? Symbol::L : Symbol::R, x);
}

bool PwaMap::is_homeomorphism() const { return det(a_left_) * det(a_right_) > 0.0; }

Vector rho(const PwaMap& map, double rel_tol) {
    const std::size_t n = map.dim();
    const Matrix id = Matrix::identity(n);
    const Vector rl = adjugate(id - map.left()).row(0);
    const Vector rr = adjugate(id - map.right()).row(0);
    const double scale = std::max(1.0, std::max(norm_inf(rl), norm_inf(rr)));
    if (norm_inf(sub(rl, rr)) > rel_tol * scale) {
        throw ContinuityViolated("first rows of adj(I - A_L) and adj(I - A_R) disagree");
    }
    return rl;
}

FixedPointReport fixed_point(const PwaMap& map, double mu, Symbol side, const Tolerances& tol) {
    const std::size_t n = map.dim();
    const Matrix ima = Matrix::identity(n) - map.branch(side);
    FixedPointReport r;
    r.side = side;
    r.det_IminusA = det(ima);
    if (is_singular_value(r.det_IminusA, ima, tol)) {
        throw UnitMultiplier(std::string("I - A_") + static_cast<char>(side) + " is singular");
    }
    r.point = solve(ima, scale(map.b(), mu), tol);
    r.s_star = r.point[0];
    r.on_manifold = std::abs(r.s_star) <= tol.band * std::max(1.0, norm_inf(r.point));
    r.admissible = r.on_manifold || (side == Symbol::L ? r.s_star < 0.0 : r.s_star > 0.0);
    return r;
}

std::string to_string(BorderCollision c) {
    switch (c) {
        case BorderCollision::Persistence:
            return "persistence";
        case BorderCollision::NonsmoothFold:
            return "nonsmooth-fold";
        case BorderCollision::Degenerate:
            return "degenerate";
    }
    return "unknown";
}

BorderCollision classify_border_collision(const PwaMap& map, const Tolerances& tol) {
    const std::size_t n = map.dim();
    const Matrix id = Matrix::identity(n);
    const Matrix iml = id - map.left(), imr = id - map.right();
    if (is_singular(iml, tol) || is_singular(imr, tol)) return BorderCollision::Degenerate;
    const Vector r = rho(map);
    if (std::abs(dot(r, map.b())) <= tol.sing * std::max(1.0, norm_inf(r) * norm_inf(map.b()))) {
        return BorderCollision::Degenerate;
    }
    const int a_l = eigenvalues(map.left()).count_real_greater_than_one();
    const int a_r = eigenvalues(map.right()).count_real_greater_than_one();
    return (a_l + a_r) % 2 == 0 ? BorderCollision::Persistence : BorderCollision::NonsmoothFold;
}

}  // namespace lenschain
