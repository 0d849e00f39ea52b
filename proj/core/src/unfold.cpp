// Local unfolding of a non-terminating shrinking point in a two-parameter
// family. The chart is (eta, nu) = (s-check_0, s-check_{ld}) evaluated on the
// solved S-check cycle, so the two check-boundaries are the coordinate axes.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lenschain/errors.hpp"
#include "lenschain/mapio.hpp"
#include "lenschain/shrink.hpp"

namespace lenschain {

namespace {

std::size_t idx(long long i, int n) {
    const long long r = i % n;
    return static_cast<std::size_t>(r < 0 ? r + n : r);
}

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

class Chart {
public:
    Chart(const MapFamily& family, Point2 xi_star, const RotationalParams& p, const Tolerances& tol)
        : family_(family), xi_star_(xi_star), p_(p), seq_(shrink_sequences(p)), tol_(tol) {
        i0_ = 0;
        ild_ = idx(static_cast<long long>(p.l) * p.d, p.n);
        h_ = std::max(1e-6, 1e-7 * std::hypot(xi_star[0], xi_star[1]));
        for (int k = 0; k < 2; ++k) {
            Point2 up = xi_star, dn = xi_star;
            up[k] += h_;
            dn[k] -= h_;
            const auto cu = eval(up);
            const auto cd = eval(dn);
            jac_[0][k] = (cu[0] - cd[0]) / (2.0 * h_);
            jac_[1][k] = (cu[1] - cd[1]) / (2.0 * h_);
        }
        det_ = jac_[0][0] * jac_[1][1] - jac_[0][1] * jac_[1][0];
        const double js = std::max({std::abs(jac_[0][0]), std::abs(jac_[0][1]), std::abs(jac_[1][0]),
                                    std::abs(jac_[1][1]), 1e-300});
        if (!(std::abs(det_) > 1e-10 * js * js)) throw DegenerateUnfolding("chart Jacobian is singular");
    }

    const ShrinkSequences& sequences() const { return seq_; }
    std::size_t ld() const { return ild_; }
    double step() const { return h_; }
    double jac(int r, int c) const { return jac_[r][c]; }

    PwaMap map_at(Point2 xi) const { return family_.at(xi[0], xi[1]); }
    double mu() const { return family_.mu; }

    std::array<double, 2> eval(Point2 xi) const {
        const CycleSolution c = solve_cycle(map_at(xi), family_.mu, seq_.check, tol_);
        return {c.s_values[i0_], c.s_values[ild_]};
    }

    /// J^{-1} v.
    Point2 solve_j(std::array<double, 2> v) const {
        return {(jac_[1][1] * v[0] - jac_[0][1] * v[1]) / det_, (-jac_[1][0] * v[0] + jac_[0][0] * v[1]) / det_};
    }

    /// xi with chart(xi) = (eta, nu), by chord Newton from the linear guess.
    ChartPoint inverse(double eta, double nu) const {
        const Point2 lin = solve_j({eta, nu});
        Point2 xi{xi_star_[0] + lin[0], xi_star_[1] + lin[1]};
        const double tol = 1e-13 * std::max(1.0, std::hypot(eta, nu));
        for (int it = 0; it < 60; ++it) {
            const auto c = eval(xi);
            const std::array<double, 2> r{c[0] - eta, c[1] - nu};
            if (std::max(std::abs(r[0]), std::abs(r[1])) <= tol) return ChartPoint{eta, nu, xi};
            const Point2 dx = solve_j(r);
            xi[0] -= dx[0];
            xi[1] -= dx[1];
        }
        throw NoConvergence("chart inverse did not converge", 60, 0.0);
    }

private:
    const MapFamily& family_;
    Point2 xi_star_;
    RotationalParams p_;
    ShrinkSequences seq_;
    Tolerances tol_;
    std::size_t i0_ = 0;
    std::size_t ild_ = 0;
    double h_ = 1e-6;
    double jac_[2][2]{};
    double det_ = 0.0;
};

// Root of f on [a, b] given a sign change (Illinois false position).
template <class F>
double bracketed_root(F&& f, double a, double b, double fa, double fb, double xtol) {
    int side = 0;
    double c = a;
    for (int it = 0; it < 200; ++it) {
        c = (a * fb - b * fa) / (fb - fa);
        if (std::abs(b - a) <= xtol) break;
        const double fc = f(c);
        if (fc == 0.0) return c;
        if (sgn(fc) == sgn(fb)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
        if (std::abs(fc) <= 1e-15) return c;
    }
    return c;
}

// Root of f near 0 within [-r, r], widening the bracket if needed.
template <class F>
double root_near_zero(F&& f, double r, const char* what) {
    for (double w = r; w <= 16.0 * r; w *= 4.0) {
        const double fa = f(-w);
        const double fb = f(w);
        if (fa == 0.0) return -w;
        if (fb == 0.0) return w;
        if (sgn(fa) != sgn(fb)) return bracketed_root(f, -w, w, fa, fb, 1e-15 * std::max(1.0, w));
    }
    throw DegenerateUnfolding(std::string("no sign change while tracing ") + what);
}

CycleProbe probe(const PwaMap& map, double mu, const SymbolSequence& s, const Tolerances& tol) {
    CycleProbe out;
    try {
        const CycleSolution c = solve_cycle(map, mu, s, tol);
        out.admissibility = c.admissibility.kind;
        out.stable = c.is_stable();
        out.real_multipliers_above_one = c.multipliers.count_real_greater_than_one();
        out.spectral_radius = c.multipliers.spectral_radius();
    } catch (const SingularSystem&) {
        out.admissibility = AdmissibilityKind::Virtual;
        out.spectral_radius = std::nan("");
    }
    return out;
}

std::vector<double> symmetric_grid(double r, int samples) {
    std::vector<double> g;
    const int k = std::max(9, samples);
    for (int j = 0; j < k; ++j) g.push_back(-r + 2.0 * r * j / (k - 1));
    return g;
}

double det_imm(const PwaMap& map, const SymbolSequence& s) {
    return det(Matrix::identity(map.dim()) - stability_matrix(map, s));
}

struct KValues {
    double k1, k2;
};

KValues chart_gradient(const Chart& chart, Point2 xi_star) {
    // Directional central differences of det(I - M_S) along the chart axes.
    const SymbolSequence& s = chart.sequences().s;
    double k[2];
    for (int a = 0; a < 2; ++a) {
        const Point2 u = chart.solve_j(a == 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0});
        const double t = chart.step() / std::hypot(u[0], u[1]);
        const double up = det_imm(chart.map_at({xi_star[0] + t * u[0], xi_star[1] + t * u[1]}), s);
        const double dn = det_imm(chart.map_at({xi_star[0] - t * u[0], xi_star[1] - t * u[1]}), s);
        k[a] = (up - dn) / (2.0 * t);
    }
    return {k[0], k[1]};
}

}  // namespace

QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) throw DimensionError("fit_quadratic needs at least three points");
    // Normal equations on x scaled to [-1, 1] for conditioning.
    double xs = 0.0;
    for (double v : x) xs = std::max(xs, std::abs(v));
    if (xs == 0.0) xs = 1.0;
    Matrix a(3);
    Vector rhs(3, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] / xs;
        const double basis[3] = {1.0, u, u * u};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += basis[r] * y[i];
            for (int c = 0; c < 3; ++c) a(r, c) += basis[r] * basis[c];
        }
    }
    const Vector c = solve(a, rhs, Tolerances{1e-14, 1e-8, 1e-9});
    QuadraticFit f{c[0], c[1] / xs, c[2] / (xs * xs), 0.0};
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = f.c0 + f.c1 * x[i] + f.c2 * x[i] * x[i] - y[i];
        ss += e * e;
    }
    f.rms = std::sqrt(ss / static_cast<double>(x.size()));
    return f;
}

Unfolding unfold(const MapFamily& family, Point2 xi_star, const RotationalParams& p, const UnfoldOptions& opts,
                 const Tolerances& tol) {
    if (p.l <= 1 || p.l >= p.n - 1) throw DegenerateUnfolding("unfolding needs a non-terminating sequence");
    const ShrinkVerdict v = check_nonterminating(family.at(xi_star[0], xi_star[1]), family.mu, p.l, p.m, p.n, tol);
    if (const auto* f = std::get_if<FailureReport>(&v)) {
        throw DegenerateUnfolding("not a shrinking point (" + f->clause + ": " + f->message + ")");
    }
    const Chart chart(family, xi_star, p, tol);
    const ShrinkSequences& seq = chart.sequences();
    const double r = opts.radius;
    const int n = p.n;

    Unfolding u;
    u.xi_star = xi_star;
    u.params = p;
    u.radius = r;
    u.chart_jacobian = {chart.jac(0, 0), chart.jac(0, 1), chart.jac(1, 0), chart.jac(1, 1)};

    const PwaMap at_star = family.at(xi_star[0], xi_star[1]);
    const CycleSolution p_orbit = solve_cycle(at_star, family.mu, seq.check, tol);
    u.t_values = p_orbit.s_values;
    auto t_at = [&](long long i) { return u.t_values[idx(i * p.d, n)]; };

    const KValues kv = chart_gradient(chart, xi_star);
    u.k1 = kv.k1;
    u.k2 = kv.k2;
    u.k3 = det_imm(at_star, seq.check);
    u.k4 = det_imm(at_star, seq.hat);
    const double kscale = std::max({1.0, std::abs(u.k3), std::abs(u.k4)});
    for (double k : {u.k1, u.k2, u.k3, u.k4}) {
        if (!(std::abs(k) > 1e-8 * kscale)) throw DegenerateUnfolding("a k coefficient vanishes");
    }

    u.allk_pattern = sgn(u.k1) == sgn(u.k2) && sgn(u.k3) == -sgn(u.k1) && sgn(u.k4) == sgn(u.k1);
    u.schematic_pattern = u.k1 * u.k2 < 0.0;
    if (u.allk_pattern) {
        u.sign_note = "sgn k1 = sgn k2 = -sgn k3 = sgn k4";
    } else if (u.schematic_pattern) {
        u.sign_note = "k1 k2 < 0 (schematic pattern); contradicts sgn k1 = sgn k2";
    } else {
        u.sign_note = "measured signs match neither k1 k2 < 0 nor sgn k1 = sgn k2 = -sgn k3 = sgn k4";
    }

    u.h_slope = -u.k1 / u.k2;
    for (long long i : virtual_curve_indices(p)) u.q_slopes[i] = -u.k1 * t_at(i + 1) / (u.k2 * t_at(i));
    u.g1_predicted = -u.k2 / (u.k1 * t_at(p.l + 1));
    u.g2_predicted = -u.k1 / (u.k2 * t_at(-1));

    const std::vector<double> grid = symmetric_grid(r, opts.samples);

    // Chart axes: {s-check_0 = 0} is eta = 0, {s-check_ld = 0} is nu = 0.
    auto& axis0 = u.boundary_samples["check_0"];
    auto& axis_ld = u.boundary_samples["check_ld"];
    for (double v : grid) {
        axis0.push_back(chart.inverse(0.0, v));
        axis_ld.push_back(chart.inverse(v, 0.0));
    }
    for (const ChartPoint& cp : axis0) u.axis_residual = std::max(u.axis_residual, std::abs(chart.eval(cp.xi)[0]));
    for (const ChartPoint& cp : axis_ld) u.axis_residual = std::max(u.axis_residual, std::abs(chart.eval(cp.xi)[1]));

    auto s_hat = [&](const ChartPoint& cp, std::size_t k) {
        return solve_cycle(chart.map_at(cp.xi), family.mu, seq.hat, tol).s_values[k];
    };

    // {s-hat_ld = 0}: eta = g1(nu).
    std::vector<double> g1_eta;
    auto& hat_ld = u.boundary_samples["hat_ld"];
    for (double v : grid) {
        const double eta = root_near_zero([&](double e) { return s_hat(chart.inverse(e, v), chart.ld()); }, r, "s-hat_ld");
        hat_ld.push_back(chart.inverse(eta, v));
        g1_eta.push_back(eta);
    }
    const QuadraticFit f1 = fit_quadratic(grid, g1_eta);
    u.g1_coeff = f1.c2;
    u.g1_linear = f1.c1;

    // {s-hat_0 = 0}: nu = g2(eta).
    std::vector<double> g2_nu;
    auto& hat_0 = u.boundary_samples["hat_0"];
    for (double e : grid) {
        const double nu = root_near_zero([&](double v) { return s_hat(chart.inverse(e, v), 0); }, r, "s-hat_0");
        hat_0.push_back(chart.inverse(e, nu));
        g2_nu.push_back(nu);
    }
    const QuadraticFit f2 = fit_quadratic(grid, g2_nu);
    u.g2_coeff = f2.c2;
    u.g2_linear = f2.c1;

    auto region = [&](double sign) {
        std::vector<RegionProbe> out;
        const double pts[3][2] = {{0.5, 0.5}, {0.25, 0.75}, {0.75, 0.25}};
        for (const auto& q : pts) {
            RegionProbe rp;
            rp.where = chart.inverse(sign * q[0] * r, sign * q[1] * r);
            const PwaMap m = chart.map_at(rp.where.xi);
            rp.s = probe(m, family.mu, seq.s, tol);
            rp.check = probe(m, family.mu, seq.check, tol);
            rp.hat = probe(m, family.mu, seq.hat, tol);
            out.push_back(rp);
        }
        return out;
    };
    u.psi1 = region(1.0);
    u.psi2 = region(-1.0);
    return u;
}

VirtualCurve virtual_curves(const MapFamily& family, Point2 xi_star, const RotationalParams& p, long long i,
                            double radius, const Tolerances& tol) {
    const std::vector<long long> valid = virtual_curve_indices(p);
    const long long ii = static_cast<long long>(idx(i, p.n));
    if (std::find(valid.begin(), valid.end(), ii) == valid.end()) {
        throw DegenerateUnfolding("index has no virtual curve through the shrinking point");
    }
    const Chart chart(family, xi_star, p, tol);
    const PwaMap at_star = family.at(xi_star[0], xi_star[1]);
    const Vector t = solve_cycle(at_star, family.mu, chart.sequences().check, tol).s_values;
    const KValues kv = chart_gradient(chart, xi_star);

    VirtualCurve vc;
    vc.index = ii;
    vc.predicted_slope = -kv.k1 * t[idx((ii + 1) * p.d, p.n)] / (kv.k2 * t[idx(ii * p.d, p.n)]);

    const SymbolSequence target = cyclic(chart.sequences().s, ii * p.d);
    auto f = [&](double eta, double nu) {
        return det(bc_matrix(chart.map_at(chart.inverse(eta, nu).xi), target));
    };

    std::vector<double> etas, nus;
    for (int j = -5; j <= 5; ++j) {
        if (j == 0) continue;
        const double eta = radius * j / 5.0;
        // Scan nu around the predicted value for the sign change closest to it.
        const double guess = vc.predicted_slope * eta;
        const double width = 2.0 * radius * std::max(1.0, std::abs(vc.predicted_slope));
        const int k = 40;
        double best_a = 0.0, best_b = 0.0, fa_best = 0.0, fb_best = 0.0, best_dist = HUGE_VAL;
        double prev_nu = guess - width;
        double prev_f = f(eta, prev_nu);
        for (int s = 1; s <= k; ++s) {
            const double nu = guess - width + 2.0 * width * s / k;
            const double fv = f(eta, nu);
            if (sgn(fv) != sgn(prev_f)) {
                const double dist = std::abs(0.5 * (nu + prev_nu) - guess);
                if (dist < best_dist) {
                    best_dist = dist;
                    best_a = prev_nu;
                    best_b = nu;
                    fa_best = prev_f;
                    fb_best = fv;
                }
            }
            prev_nu = nu;
            prev_f = fv;
        }
        if (best_dist == HUGE_VAL) continue;
        const double nu = bracketed_root([&](double v) { return f(eta, v); }, best_a, best_b, fa_best, fb_best, 1e-15);
        const ChartPoint cp = chart.inverse(eta, nu);
        vc.samples.push_back(cp);
        const CycleSolution c = solve_cycle(chart.map_at(cp.xi), family.mu, chart.sequences().s, tol);
        vc.verdicts.push_back(c.admissibility.kind);
        etas.push_back(eta);
        nus.push_back(nu);
    }
    if (etas.size() < 3) throw DegenerateUnfolding("virtual curve could not be traced");
    vc.fitted_slope = fit_quadratic(etas, nus).c1;
    return vc;
}

std::string format_unfolding(const Unfolding& u) {
    std::ostringstream os;
    auto kind = [](const CycleProbe& c) {
        return to_string(c.admissibility) + (c.stable ? " stable" : " unstable") +
               " a=" + std::to_string(c.real_multipliers_above_one);
    };
    os << "xi_star: " << format_double(u.xi_star[0]) << ", " << format_double(u.xi_star[1]) << '\n';
    os << "sequence: " << rotational(u.params).str() << '\n';
    os << "radius: " << format_double(u.radius) << '\n';
    os << "k1: " << format_double(u.k1) << "\nk2: " << format_double(u.k2) << "\nk3: " << format_double(u.k3)
       << "\nk4: " << format_double(u.k4) << '\n';
    os << "sign_pattern: " << u.sign_note << '\n';
    os << "h_slope: " << format_double(u.h_slope) << '\n';
    os << "g1_coeff: " << format_double(u.g1_coeff) << " (predicted " << format_double(u.g1_predicted) << ")\n";
    os << "g2_coeff: " << format_double(u.g2_coeff) << " (predicted " << format_double(u.g2_predicted) << ")\n";
    os << "g1_linear: " << format_double(u.g1_linear) << "\ng2_linear: " << format_double(u.g2_linear) << '\n';
    os << "axis_residual: " << format_double(u.axis_residual) << '\n';
    for (const auto& [i, q] : u.q_slopes) os << "q" << i << "_slope: " << format_double(q) << '\n';
    auto region = [&](const char* name, const std::vector<RegionProbe>& probes) {
        for (std::size_t k = 0; k < probes.size(); ++k) {
            const RegionProbe& rp = probes[k];
            os << name << "[" << k << "]: eta=" << format_double(rp.where.eta) << " nu=" << format_double(rp.where.nu)
               << " | S " << kind(rp.s) << " | check " << kind(rp.check) << " | hat " << kind(rp.hat) << '\n';
        }
    };
    region("psi1", u.psi1);
    region("psi2", u.psi2);
    return os.str();
}

}  // namespace lenschain
