#include "lenschain/shrink.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lenschain/errors.hpp"
#include "lenschain/mapio.hpp"

namespace lenschain {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Spectrum-on-the-unit-circle test for terminating points.
constexpr double kEigenGapTol = 1e-8;
constexpr double kEqSidTol = 1e-8;

std::size_t idx(long long i, int n) {
    const long long r = i % n;
    return static_cast<std::size_t>(r < 0 ? r + n : r);
}

double max_norm(const std::vector<Vector>& pts) {
    double m = 0.0;
    for (const Vector& x : pts) m = std::max(m, norm_inf(x));
    return m;
}

bool rho_b_vanishes(const PwaMap& map, const Tolerances& tol) {
    const Vector r = rho(map, 1e-8);
    return std::abs(dot(r, map.b())) <= tol.sing * std::max(1.0, norm_inf(r) * norm_inf(map.b()));
}

FailureReport fail(std::string clause, double residual, std::string message) {
    return FailureReport{std::move(clause), residual, std::move(message)};
}

int smallest_period(const std::vector<Vector>& pts, double rel_tol) {
    const int n = static_cast<int>(pts.size());
    const double scale = std::max(1.0, max_norm(pts));
    for (int q = 1; q < n; ++q) {
        if (n % q != 0) continue;
        double dev = 0.0;
        for (int i = 0; i < n; ++i) dev = std::max(dev, norm_inf(sub(pts[idx(i + q, n)], pts[i])));
        if (dev <= rel_tol * scale) return q;
    }
    return n;
}

// Worst strict sign violation of an orbit, for failure reports.
double worst_violation(const CycleSolution& c) {
    double w = 0.0;
    for (std::size_t i : c.admissibility.violating) w = std::max(w, std::abs(c.s_values[i]));
    return w;
}

void fill_orbit_checks(ShrinkingPointCertificate& c, const Tolerances& tol) {
    const auto& p = c.params;
    const int n = p.n;
    const double scale = std::max(1.0, max_norm(c.p_orbit.points));
    c.zeros_ok = std::abs(c.t_at(0)) <= tol.band * scale && std::abs(c.t_at(p.l)) <= tol.band * scale;
    if (c.kind == ShrinkKind::NonTerminating) {
        c.signs_ok = c.t_at(1) < 0.0 && c.t_at(p.l - 1) < 0.0 && c.t_at(p.l + 1) > 0.0 && c.t_at(-1) > 0.0;
    } else {
        bool ok = true;
        for (int i = 1; i < n - 1; ++i) ok = ok && c.t_at(i) < 0.0;
        c.signs_ok = ok;
    }
    c.minimal_period = smallest_period(c.p_orbit.points, 1e-9);
}

double segment_distance(const Vector& p1, const Vector& q1, const Vector& p2, const Vector& q2) {
    // Closest points of two segments in R^N (clamped parametric form).
    const Vector d1 = sub(q1, p1);
    const Vector d2 = sub(q2, p2);
    const Vector r = sub(p1, p2);
    const double a = dot(d1, d1);
    const double e = dot(d2, d2);
    const double f = dot(d2, r);
    double s = 0.0;
    double t = 0.0;
    if (a <= 0.0 && e <= 0.0) return norm2(r);
    if (a <= 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (e <= 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return norm2(sub(axpy(s, d1, p1), axpy(t, d2, p2)));
}

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a > std::numbers::pi) a -= kTwoPi;
    if (a <= -std::numbers::pi) a += kTwoPi;
    return a;
}

// Construction of the terminating p-orbit on the centre
// eigenspace of A_L: x_i = [y z] D^i [alpha beta]^T + x*.
std::vector<Vector> terminating_orbit(const ShrinkingPointCertificate& c) {
    const auto& p = c.params;
    const Matrix& a = c.map.left();
    const Complex target = std::polar(1.0, kTwoPi * p.m / p.n);
    const Spectrum sp = eigenvalues(a);
    Complex lambda = target;
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& z : sp.eigenvalues) {
        if (std::abs(z - target) < best) {
            best = std::abs(z - target);
            lambda = z;
        }
    }
    std::vector<Complex> v = eigenvector(a, lambda);
    if (std::abs(v[0]) == 0.0) throw DegenerateCertificate("centre eigenvector has zero first component");
    // Phase and scale so e1^T v = 1.
    const Complex v0 = v[0];
    for (Complex& x : v) x /= v0;
    const std::size_t dim = a.dim();
    Vector y(dim), z(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        y[k] = v[k].real();
        z[k] = v[k].imag();
    }
    const FixedPointReport fp = fixed_point(c.map, c.mu, Symbol::L);
    const double s_star = fp.s_star;
    // X [alpha beta]^T = -s* [1 1]^T with e1^T y = 1, e1^T z = 0.
    const double cs = std::cos(kTwoPi / p.n);
    const double sn = std::sin(kTwoPi / p.n);
    const double alpha = -s_star;
    const double beta = s_star * (1.0 - cs) / sn;
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(p.n));
    for (int i = 0; i < p.n; ++i) {
        const double th = kTwoPi * p.m * i / p.n;
        const double ci = std::cos(th);
        const double si = std::sin(th);
        // [y z] D^i [alpha beta]^T with D^i = [[ci, si], [-si, ci]].
        const double ay = ci * alpha + si * beta;
        const double az = -si * alpha + ci * beta;
        Vector x = fp.point;
        for (std::size_t k = 0; k < dim; ++k) x[k] += ay * y[k] + az * z[k];
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace

std::string to_string(ShrinkKind k) { return k == ShrinkKind::Terminating ? "terminating" : "non-terminating"; }

ShrinkSequences shrink_sequences(const RotationalParams& p) {
    const SymbolSequence s = rotational(p);
    return ShrinkSequences{s, flip(s, 0), flip(s, static_cast<long long>(p.l) * p.d)};
}

double ShrinkingPointCertificate::t_at(long long i) const {
    return t_values[idx(i * params.d, params.n)];
}

ShrinkVerdict check_nonterminating(const PwaMap& map, double mu, int l, int m, int n, const Tolerances& tol) {
    if (map.dim() < 2) return fail("preconditions", 0.0, "dimension must be at least 2");
    if (mu == 0.0) return fail("preconditions", 0.0, "mu must be nonzero");
    if (n < 4 || l <= 1 || l >= n - 1) return fail("preconditions", 0.0, "need 1 < l < n-1");
    if (m <= 0 || gcd(m, n) != 1) return fail("preconditions", 0.0, "m and n must be coprime");
    if (rho_b_vanishes(map, tol)) return fail("preconditions", 0.0, "rho^T b vanishes");

    const RotationalParams p = make_rotational_params(l, m, n);
    const ShrinkSequences seq = shrink_sequences(p);
    const std::size_t dim = map.dim();

    const Matrix ps = bc_matrix(map, seq.s);
    const double det_ps = det(ps);
    if (!is_singular_value(det_ps, ps, tol)) return fail("det_P_S", det_ps, "P_S is nonsingular");

    const Matrix pl = bc_matrix(map, cyclic(seq.s, static_cast<long long>(l - 1) * p.d));
    const double det_pl = det(pl);
    if (!is_singular_value(det_pl, pl, tol)) return fail("det_P_S_l1d", det_pl, "P_{S^((l-1)d)} is nonsingular");

    const Matrix ic = Matrix::identity(dim) - stability_matrix(map, seq.check);
    const double det_ic = det(ic);
    if (is_singular_value(det_ic, ic, tol)) return fail("det_IminusM_check", det_ic, "I - M of S-check is singular");

    const Matrix ih = Matrix::identity(dim) - stability_matrix(map, seq.hat);
    const double det_ih = det(ih);
    if (is_singular_value(det_ih, ih, tol)) return fail("det_IminusM_hat", det_ih, "I - M of S-hat is singular");

    CycleSolution orbit = solve_cycle(map, mu, seq.check, tol);
    if (!orbit.admissibility.ok()) return fail("p_orbit", worst_violation(orbit), "S-check cycle is virtual");

    ShrinkingPointCertificate c(map, mu);
    c.kind = ShrinkKind::NonTerminating;
    c.params = p;
    c.t_values = orbit.s_values;
    c.residuals = {{"det_P_S", det_ps},
                   {"det_P_S_l1d", det_pl},
                   {"det_IminusM_check", det_ic},
                   {"det_IminusM_hat", det_ih},
                   {"admissibility_margin", orbit.admissibility.margin}};
    c.p_orbit = std::move(orbit);
    fill_orbit_checks(c, tol);
    return c;
}

double terminating_s(double s_star, long long i, int n) {
    return s_star * (1.0 - std::cos(kTwoPi * (static_cast<double>(i) + 0.5) / n) / std::cos(std::numbers::pi / n));
}

ShrinkVerdict check_terminating(const PwaMap& map, double mu, int m, int n, const Tolerances& tol) {
    if (map.dim() < 2) return fail("preconditions", 0.0, "dimension must be at least 2");
    if (mu == 0.0) return fail("preconditions", 0.0, "mu must be nonzero");
    if (n < 3) return fail("preconditions", 0.0, "need n >= 3");
    if (m <= 0 || gcd(m, n) != 1) return fail("preconditions", 0.0, "m and n must be coprime");

    const RotationalParams p = make_rotational_params(n - 1, m, n);
    const ShrinkSequences seq = shrink_sequences(p);
    const std::size_t dim = map.dim();

    const Complex target = std::polar(1.0, kTwoPi * m / n);
    const Spectrum sp = eigenvalues(map.left());
    const double gap = std::max(sp.distance_to(target), sp.distance_to(std::conj(target)));
    if (gap > kEigenGapTol * std::max(1.0, map.left().norm_inf())) {
        return fail("eigenvalue_gap", gap, "exp(+-2 pi i m/n) is not in the spectrum of A_L");
    }

    FixedPointReport fp;
    try {
        fp = fixed_point(map, mu, Symbol::L, tol);
    } catch (const UnitMultiplier&) {
        return fail("fixed_point", 0.0, "I - A_L is singular");
    }
    if (!fp.admissible || fp.on_manifold) return fail("fixed_point", fp.s_star, "x*(L) is not admissible");

    const Matrix ic = Matrix::identity(dim) - stability_matrix(map, seq.check);
    const double det_ic = det(ic);
    if (is_singular_value(det_ic, ic, tol)) return fail("det_IminusM_check", det_ic, "I - M of S-check is singular");

    CycleSolution orbit = solve_cycle(map, mu, seq.check, tol);
    double sid = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = orbit.s_values[idx(static_cast<long long>(i) * p.d, n)];
        sid = std::max(sid, std::abs(t - terminating_s(fp.s_star, i, n)));
    }
    if (sid > kEqSidTol * std::max(1.0, std::abs(fp.s_star))) {
        return fail("eq_sid", sid, "S-check cycle does not follow the cosine profile");
    }
    if (!orbit.admissibility.ok()) return fail("p_orbit", worst_violation(orbit), "S-check cycle is virtual");

    const Matrix ps = bc_matrix(map, seq.s);
    ShrinkingPointCertificate c(map, mu);
    c.kind = ShrinkKind::Terminating;
    c.params = p;
    c.t_values = orbit.s_values;
    c.residuals = {{"eigenvalue_gap", gap},
                   {"det_IminusM_check", det_ic},
                   {"eq_sid", sid},
                   {"det_P_S", det(ps)},
                   {"admissibility_margin", orbit.admissibility.margin}};
    c.p_orbit = std::move(orbit);
    fill_orbit_checks(c, tol);
    return c;
}

double planarity_defect(const std::vector<Vector>& points) {
    if (points.empty()) return 0.0;
    const std::size_t dim = points.front().size();
    if (dim <= 2) return 0.0;
    Vector centre(dim, 0.0);
    for (const Vector& x : points) centre = add(centre, x);
    centre = scale(centre, 1.0 / static_cast<double>(points.size()));
    Matrix cov(dim);
    for (const Vector& x : points) {
        const Vector r = sub(x, centre);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) cov(i, j) += r[i] * r[j];
    }
    cov *= 1.0 / static_cast<double>(points.size());
    const Vector ev = symmetric_eigenvalues(cov);
    double rest = 0.0;
    for (std::size_t i = 2; i < ev.size(); ++i) rest += std::max(0.0, ev[i]);
    return std::sqrt(rest);
}

Polygon polygon(const ShrinkingPointCertificate& cert, int tau_grid_size, const Tolerances& tol) {
    const auto& p = cert.params;
    const int n = p.n;
    const SymbolSequence s = rotational(p);
    Polygon poly;

    std::vector<Vector> pts = cert.p_orbit.points;
    if (cert.kind == ShrinkKind::Terminating) {
        std::vector<Vector> built = terminating_orbit(cert);
        double dev = 0.0;
        for (int i = 0; i < n; ++i) dev = std::max(dev, norm_inf(sub(built[i], pts[i])));
        poly.construction_residual = dev;
        pts = std::move(built);
    }

    const double scale_pts = std::max(1.0, max_norm(pts));
    double shift = 0.0;
    for (int i = 0; i < n; ++i) shift = std::max(shift, norm_inf(sub(pts[i], pts[idx(i + p.d, n)])));
    if (shift <= tol.band * scale_pts) throw DegenerateCertificate("p and p_d coincide");

    for (int j = 0; j < n; ++j) poly.vertices.push_back(pts[idx(static_cast<long long>(j) * p.d, n)]);
    poly.planarity_defect = planarity_defect(poly.vertices);

    const int g = std::max(1, tau_grid_size);
    for (int k = 0; k < g; ++k) {
        SampledCycle sc;
        sc.tau = g == 1 ? 0.0 : static_cast<double>(k) / (g - 1);
        for (int i = 0; i < n; ++i) {
            sc.points.push_back(add(scale(pts[i], sc.tau), scale(pts[idx(i + p.d, n)], 1.0 - sc.tau)));
        }
        const double sc_scale = std::max(1.0, max_norm(sc.points));
        for (int i = 0; i < n; ++i) {
            const Vector img = cert.map.apply_branch(cert.mu, s[i], sc.points[i]);
            sc.wrap_residual = std::max(sc.wrap_residual, norm_inf(sub(img, sc.points[idx(i + 1, n)])) / sc_scale);
        }
        sc.admissibility = admissibility(sc.points, s, tol.band).kind;
        poly.sampled_cycles.push_back(std::move(sc));
    }

    poly.min_edge_separation = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
        for (int b = a + 2; b < n; ++b) {
            if (a == 0 && b == n - 1) continue;  // adjacent through the wrap
            const double dist = segment_distance(poly.vertices[a], poly.vertices[idx(a + 1, n)], poly.vertices[b],
                                                 poly.vertices[idx(b + 1, n)]);
            poly.min_edge_separation = std::min(poly.min_edge_separation, dist);
        }
    }
    poly.self_intersecting = poly.min_edge_separation <= tol.band * scale_pts;
    return poly;
}

Vector polygon_point(const Polygon& poly, double theta) {
    const int n = static_cast<int>(poly.vertices.size());
    double u = std::fmod(theta, kTwoPi);
    if (u < 0.0) u += kTwoPi;
    u *= n / kTwoPi;
    const int j = std::min(n - 1, static_cast<int>(std::floor(u)));
    const double frac = u - j;
    return add(scale(poly.vertices[j], 1.0 - frac), scale(poly.vertices[idx(j + 1, n)], frac));
}

double polygon_angle(const Polygon& poly, std::span<const double> x) {
    const int n = static_cast<int>(poly.vertices.size());
    double best = std::numeric_limits<double>::infinity();
    double angle = 0.0;
    for (int j = 0; j < n; ++j) {
        const Vector& a = poly.vertices[j];
        const Vector e = sub(poly.vertices[idx(j + 1, n)], a);
        const double ee = dot(e, e);
        const double frac = ee > 0.0 ? std::clamp(dot(sub(x, a), e) / ee, 0.0, 1.0) : 0.0;
        const double dist = norm2(sub(x, axpy(frac, e, a)));
        if (dist < best) {
            best = dist;
            angle = kTwoPi * (j + frac) / n;
        }
    }
    return angle;
}

double rigid_rotation_check(const ShrinkingPointCertificate& cert, const Polygon& poly, int grid) {
    const double rot = kTwoPi * cert.params.m / cert.params.n;
    double worst = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double theta = kTwoPi * k / grid;
        const Vector z = polygon_point(poly, theta);
        const Vector fz = cert.map.evaluate(cert.mu, z);
        const double back = polygon_angle(poly, fz);
        worst = std::max(worst, std::abs(wrap_angle(back - theta - rot)));
        // An image off the polygon is a failure too, even if its projection lands well.
        worst = std::max(worst, norm_inf(sub(polygon_point(poly, back), fz)) / std::max(1.0, norm_inf(fz)));
    }
    return worst;
}

bool CorollaryReport::all_singular() const {
    if (!singular_IminusM) return false;
    for (std::size_t i = 0; i < singular_P.size(); ++i) {
        if (excluded_index && static_cast<long long>(i) == *excluded_index) continue;
        if (!singular_P[i]) return false;
    }
    return true;
}

CorollaryReport corollary_check(const PwaMap& map, double mu, const RotationalParams& p, const Tolerances& tol) {
    (void)mu;  // the determinants do not depend on mu
    const SymbolSequence s = rotational(p);
    CorollaryReport r;
    const Matrix imm = Matrix::identity(map.dim()) - stability_matrix(map, s);
    r.det_IminusM = det(imm);
    r.singular_IminusM = is_singular_value(r.det_IminusM, imm, tol);
    for (int i = 0; i < p.n; ++i) {
        const Matrix pm = bc_matrix(map, cyclic(s, i));
        const double dp = det(pm);
        r.det_P.push_back(dp);
        r.singular_P.push_back(is_singular_value(dp, pm, tol));
    }
    if (p.l == p.n - 1) r.excluded_index = static_cast<long long>(idx(-p.d, p.n));
    return r;
}

bool MapFamily::contains(double p1, double p2) const {
    return p1 >= box[0] && p1 <= box[1] && p2 >= box[2] && p2 <= box[3];
}

namespace {

std::array<double, 2> shrink_dets(const MapFamily& family, const RotationalParams& p, Point2 xi) {
    const PwaMap map = family.at(xi[0], xi[1]);
    const SymbolSequence s = rotational(p);
    return {det(bc_matrix(map, s)), det(bc_matrix(map, cyclic(s, static_cast<long long>(p.l - 1) * p.d)))};
}

double inf2(const std::array<double, 2>& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

}  // namespace

double shrink_residual(const MapFamily& family, const RotationalParams& p, Point2 xi) {
    return inf2(shrink_dets(family, p, xi));
}

ShrinkSearch find_shrinking_point(const MapFamily& family, const RotationalParams& p, Point2 guess,
                                  const NewtonOptions& opts, const Tolerances& tol) {
    Point2 xi = guess;
    std::array<double, 2> f = shrink_dets(family, p, xi);
    double res = inf2(f);
    const double res0 = res;
    int it = 0;
    while (!(res < opts.abs_tol || res < opts.rel_tol * res0)) {
        if (it >= opts.max_iterations) throw NoConvergence("shrinking point search did not converge", it, res);
        ++it;
        const double h = std::max(1e-6, 1e-7 * std::hypot(xi[0], xi[1]));
        double jac[2][2];
        for (int k = 0; k < 2; ++k) {
            Point2 up = xi, dn = xi;
            up[k] += h;
            dn[k] -= h;
            const auto fu = shrink_dets(family, p, up);
            const auto fd = shrink_dets(family, p, dn);
            jac[0][k] = (fu[0] - fd[0]) / (2.0 * h);
            jac[1][k] = (fu[1] - fd[1]) / (2.0 * h);
        }
        const double dj = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        const double jscale = std::max({std::abs(jac[0][0]), std::abs(jac[0][1]), std::abs(jac[1][0]),
                                        std::abs(jac[1][1]), 1e-300});
        if (!(std::abs(dj) > 1e-12 * jscale * jscale)) throw SingularJacobian("determinant Jacobian is singular");
        const Point2 step{-(jac[1][1] * f[0] - jac[0][1] * f[1]) / dj, -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / dj};

        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half <= opts.max_halvings; ++half, lambda *= 0.5) {
            const Point2 trial{xi[0] + lambda * step[0], xi[1] + lambda * step[1]};
            if (!family.contains(trial[0], trial[1])) continue;
            try {
                const auto ft = shrink_dets(family, p, trial);
                if (inf2(ft) < res) {
                    xi = trial;
                    f = ft;
                    res = inf2(ft);
                    accepted = true;
                    break;
                }
            } catch (const Error&) {
                continue;
            }
        }
        if (!accepted) throw NoConvergence("damped Newton step rejected", it, res);
    }
    ShrinkSearch out{xi, it, res, check_nonterminating(family.at(xi[0], xi[1]), family.mu, p.l, p.m, p.n, tol)};
    return out;
}

std::vector<long long> virtual_curve_indices(const RotationalParams& p) {
    std::vector<long long> out;
    const bool terminating = p.l == p.n - 1;
    for (long long i = 0; i < p.n; ++i) {
        if (i == 0 || i == p.n - 1) continue;
        if (terminating) {
            if (i == p.n - 2) continue;
        } else if (i == p.l - 1 || i == p.l) {
            continue;
        }
        out.push_back(i);
    }
    return out;
}

std::string format_certificate(const ShrinkingPointCertificate& c) {
    std::ostringstream os;
    os << "verdict: certificate\n";
    os << "kind: " << to_string(c.kind) << '\n';
    os << "l: " << c.params.l << "\nm: " << c.params.m << "\nn: " << c.params.n << "\nd: " << c.params.d << '\n';
    os << "sequence: " << rotational(c.params).str() << '\n';
    os << "check_sequence: " << c.p_orbit.sequence.str() << '\n';
    for (const auto& [k, v] : c.residuals) os << k << ": " << format_double(v) << '\n';
    os << "zeros_ok: " << (c.zeros_ok ? "true" : "false") << '\n';
    os << "signs_ok: " << (c.signs_ok ? "true" : "false") << '\n';
    os << "minimal_period: " << c.minimal_period << '\n';
    for (std::size_t i = 0; i < c.p_orbit.points.size(); ++i) {
        os << "p" << i << ":";
        for (std::size_t k = 0; k < c.p_orbit.points[i].size(); ++k) {
            os << (k == 0 ? " " : ", ") << format_double(c.p_orbit.points[i][k]);
        }
        os << '\n';
    }
    return os.str();
}

std::string format_failure(const FailureReport& f) {
    std::ostringstream os;
    os << "verdict: failure\nclause: " << f.clause << "\nresidual: " << format_double(f.residual)
       << "\nmessage: " << f.message << '\n';
    return os.str();
}

}  // namespace lenschain
