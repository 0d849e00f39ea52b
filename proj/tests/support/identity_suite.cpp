#include "identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lenschain/cycles.hpp"
#include "lenschain/errors.hpp"
#include "oracles.hpp"

namespace oracle {

using namespace lenschain;

namespace {

PwaMap with_right_first_column(const PwaMap& f, double a00) {
    Matrix ar = f.right();
    ar(0, 0) = a00;
    return PwaMap(f.left(), ar, f.b());
}

PwaMap scaled(const PwaMap& f, double t) { return PwaMap(f.left() * t, f.right() * t, f.b()); }

bool has_r_after_first(const SymbolSequence& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[static_cast<long long>(i)] == Symbol::R) return true;
    return false;
}

double rho_b(const PwaMap& f) {
    const Vector r = rho(f);
    return dot(r, f.b()) / std::max(1.0, norm_inf(r) * norm_inf(f.b()));
}

// Checks the biconditional "x_0 on the manifold <=> P_S singular" for one instance.
bool biconditional_holds(const PwaMap& f, double mu, const SymbolSequence& s, const Tolerances& tol) {
    const SolutionNature nat = solution_nature(f, mu, s, tol);
    const CycleSolution c = solve_cycle(f, mu, s, tol);
    const bool on = std::abs(c.s_values[0]) <= tol.band * std::max(1.0, norm_inf(c.points[0]));
    return on == nat.singular_P;
}

}  // namespace

IdentitySuiteReport run_identity_suite(std::uint64_t seed, int instances, int corpus_size) {
    IdentitySuiteReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dim(2, 5), len(1, 9);
    const Tolerances tol;
    const double mu = 1.0;

    // Identities over general instances; every fourth one has det A_L = 0.
    while (rep.instances < instances) {
        PwaMap f = random_map(rng, static_cast<std::size_t>(dim(rng)));
        const bool singular_branch = rep.instances % 4 == 0;
        if (singular_branch) {
            Matrix al = f.left();
            al.set_col(0, Vector(f.dim(), 0.0));
            f = PwaMap(al, f.right(), f.b());
        }
        const SymbolSequence s = random_sequence(rng, len(rng));
        const SymbolSequence s0 = flip(s, 0);
        const std::size_t n = s.size(), N = f.dim();
        ++rep.instances;
        if (singular_branch) ++rep.singular_branch_instances;

        const Matrix p = bc_matrix(f, s), pf = bc_matrix(f, s0);
        if (!(p == pf)) rep.p_independent_of_s0 = false;
        const Matrix m = stability_matrix(f, s), mf = stability_matrix(f, s0);
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 1; c < N; ++c)
                if (m(r, c) != mf(r, c)) rep.m_columns_shared = false;

        const Matrix id = Matrix::identity(N);
        const double d0 = det(id - m);
        for (std::size_t i = 1; i < n; ++i) {
            const double di = det(id - stability_matrix(f, cyclic(s, static_cast<long long>(i))));
            rep.max_cyclic_det_err =
                std::max(rep.max_cyclic_det_err, std::abs(di - d0) / std::max(1.0, std::abs(d0)));
        }

        try {
            const CycleSolution a = solve_cycle(f, mu, s, tol);
            const CycleSolution b = solve_cycle(f, mu, s0, tol);
            const double lhs = a.det_IminusM * a.s_values[0];
            const double rhs = b.det_IminusM * b.s_values[0];
            const double scale = std::max({1.0, std::abs(a.det_IminusM) * norm_inf(a.points[0]),
                                           std::abs(b.det_IminusM) * norm_inf(b.points[0])});
            rep.max_flip_identity_err = std::max(rep.max_flip_identity_err, std::abs(lhs - rhs) / scale);

            const auto ref = stacked_cycle(f, mu, s);
            for (std::size_t i = 0; i < n; ++i) {
                const double e = norm_inf(sub(a.points[i], ref[i])) / std::max(1.0, norm_inf(ref[i]));
                rep.max_stacked_err = std::max(rep.max_stacked_err, e);
            }
        } catch (const SingularSystem&) {
            rep.notes.push_back("identity instance skipped: I - M_S singular");
        }
    }

    // On-manifold corpus: move A_R(0,0) onto a root of det P_S by bisection.
    int attempts = 0;
    while (rep.on_manifold < corpus_size && attempts < 50 * corpus_size) {
        ++attempts;
        const PwaMap f = random_map(rng, static_cast<std::size_t>(dim(rng)));
        const SymbolSequence s = random_sequence(rng, std::max(2, len(rng)));
        if (!has_r_after_first(s)) continue;
        auto det_p = [&](double a) { return det(bc_matrix(with_right_first_column(f, a), s)); };
        double lo = std::numeric_limits<double>::quiet_NaN(), hi = lo;
        double prev = det_p(-4.0);
        for (int k = 1; k <= 400; ++k) {
            const double a = -4.0 + 8.0 * k / 400.0;
            const double cur = det_p(a);
            if ((prev < 0) != (cur < 0)) {
                lo = a - 8.0 / 400.0;
                hi = a;
                break;
            }
            prev = cur;
        }
        if (std::isnan(lo)) continue;
        const bool lo_neg = det_p(lo) < 0;
        for (int it = 0; it < 200 && lo < hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            ((det_p(mid) < 0) == lo_neg ? lo : hi) = mid;
        }
        const double root = std::abs(det_p(lo)) < std::abs(det_p(hi)) ? lo : hi;
        const PwaMap g = with_right_first_column(f, root);
        const Matrix m = stability_matrix(g, s);
        const Matrix im = Matrix::identity(g.dim()) - m;
        if (std::abs(det(im)) < 1e-2 * singularity_scale(im) || std::abs(rho_b(g)) < 1e-2) continue;
        if (!solution_nature(g, mu, s, tol).singular_P) {
            ++rep.biconditional_failures;
            rep.notes.push_back("bisected P_S not flagged singular for " + s.str());
            continue;
        }
        ++rep.on_manifold;
        if (!biconditional_holds(g, mu, s, tol)) {
            ++rep.biconditional_failures;
            rep.notes.push_back("on-manifold biconditional failed for " + s.str());
        }
    }

    // Off-manifold corpus: generic instances kept well away from both thresholds.
    attempts = 0;
    while (rep.off_manifold < corpus_size && attempts < 50 * corpus_size) {
        ++attempts;
        const PwaMap f = random_map(rng, static_cast<std::size_t>(dim(rng)));
        const SymbolSequence s = random_sequence(rng, len(rng));
        const Matrix p = bc_matrix(f, s);
        const Matrix im = Matrix::identity(f.dim()) - stability_matrix(f, s);
        if (std::abs(det(p)) < 1e-2 * singularity_scale(p) || std::abs(det(im)) < 1e-2 * singularity_scale(im) ||
            std::abs(rho_b(f)) < 1e-2)
            continue;
        ++rep.off_manifold;
        if (!biconditional_holds(f, mu, s, tol)) {
            ++rep.biconditional_failures;
            rep.notes.push_back("off-manifold biconditional failed for " + s.str());
        }
    }

    // No-solution corpus: scale both branches so that M_S has a unit eigenvalue.
    attempts = 0;
    rep.min_lsq_residual = std::numeric_limits<double>::infinity();
    while (rep.no_solution < corpus_size && attempts < 50 * corpus_size) {
        ++attempts;
        const PwaMap f = random_map(rng, static_cast<std::size_t>(dim(rng)));
        const SymbolSequence s = random_sequence(rng, len(rng));
        const int n = static_cast<int>(s.size());
        const Spectrum sp = eigenvalues(stability_matrix(f, s));
        double lam = 0.0;
        for (const auto& z : sp.eigenvalues) {
            if (std::abs(z.imag()) > 1e-12 * (1.0 + std::abs(z))) continue;
            if (std::abs(z.real()) < 1e-2) continue;
            if (z.real() < 0 && n % 2 == 0) continue;
            lam = z.real();
            break;
        }
        if (lam == 0.0) continue;
        const double t = std::copysign(std::pow(std::abs(lam), -1.0 / n), lam);
        const PwaMap g = scaled(f, t);
        const Matrix p = bc_matrix(g, s);
        if (std::abs(det(p)) < 1e-2 * singularity_scale(p) || std::abs(rho_b(g)) < 1e-2) continue;
        // Keep the kernel of I - M_S one-dimensional and well separated.
        const Spectrum sg = eigenvalues(stability_matrix(g, s));
        int near_one = 0;
        for (const auto& z : sg.eigenvalues)
            if (std::abs(z - Complex(1.0)) < 1e-2) ++near_one;
        if (near_one != 1) continue;
        ++rep.no_solution;
        const SolutionNature nat = solution_nature(g, mu, s, tol);
        bool threw = false;
        try {
            solve_cycle(g, mu, s, tol);
        } catch (const SingularSystem&) {
            threw = true;
        }
        const double res = stacked_lsq_residual(g, mu, s);
        rep.min_lsq_residual = std::min(rep.min_lsq_residual, res);
        if (nat.cell != SolutionCell::NoSolution || !threw || !(res > 1e-4)) {
            ++rep.no_solution_failures;
            rep.notes.push_back("no-solution verdict failed for " + s.str() + " (residual " + std::to_string(res) +
                                ", cell " + to_string(nat.cell) + ")");
        }
    }
    return rep;
}

}  // namespace oracle
