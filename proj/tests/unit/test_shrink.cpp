#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "lenschain/errors.hpp"
#include "lenschain/family.hpp"
#include "lenschain/shrink.hpp"

using namespace lenschain;

namespace {

ShrinkingPointCertificate pentagon_certificate() {
    const ShrinkVerdict v = check_nonterminating(oracle::pentagon_map(), 1.0, 2, 2, 5);
    REQUIRE(granted(v));
    return std::get<ShrinkingPointCertificate>(v);
}

}  // namespace

TEST_CASE("shrink sequences") {
    const ShrinkSequences q = shrink_sequences(make_rotational_params(3, 2, 7));
    CHECK(q.s.str() == "LLRRLRR");
    CHECK(q.check.str() == "RLRRLRR");
    // l d = 12 = 5 (mod 7)
    CHECK(q.hat.str() == "LLRRLLR");
}

TEST_CASE("pentagon certificate") {
    const ShrinkingPointCertificate c = pentagon_certificate();
    CHECK(c.kind == ShrinkKind::NonTerminating);
    CHECK(c.zeros_ok);
    CHECK(c.signs_ok);
    CHECK(c.minimal_period == 5);
    const Vector& p0 = c.p_orbit.points[0];
    CHECK(std::abs(p0[0] - 0.0) <= 1e-9);
    CHECK(std::abs(p0[1] + 1.0) <= 1e-9);
    CHECK(std::abs(p0[2] - 1.5) <= 1e-9);
    CHECK(std::abs(c.t_at(0)) <= 1e-9);
    CHECK(std::abs(c.t_at(2)) <= 1e-9);  // t_{ld}
    CHECK(c.t_at(1) < 0);
    CHECK(c.t_at(3) > 0);
    CHECK(c.t_at(-1) > 0);
    CHECK(!format_certificate(c).empty());
}

TEST_CASE("pentagon corollary: every relevant determinant vanishes") {
    const CorollaryReport r = corollary_check(oracle::pentagon_map(), 1.0, make_rotational_params(2, 2, 5));
    CHECK(r.singular_IminusM);
    REQUIRE(r.singular_P.size() == 5);
    for (bool b : r.singular_P) CHECK(b);
    CHECK_FALSE(r.excluded_index);
    CHECK(r.all_singular());
}

TEST_CASE("rotation-equivalent parameters certify the same point") {
    // S[2,3,5] = LRLRR is a cyclic shift of S[2,2,5] = LRRLR.
    CHECK(granted(check_nonterminating(oracle::pentagon_map(), 1.0, 2, 3, 5)));
    const ShrinkVerdict v = check_nonterminating(oracle::pentagon_map(), 1.0, 2, 1, 5);
    REQUIRE_FALSE(granted(v));
    const FailureReport& f = std::get<FailureReport>(v);
    CHECK(f.clause == "det_P_S");
    CHECK(!format_failure(f).empty());
}

TEST_CASE("non-terminating check rejects bad input and non-shrinking maps") {
    const ShrinkVerdict a = check_nonterminating(oracle::pentagon_map(), 1.0, 4, 2, 5);
    REQUIRE_FALSE(granted(a));
    CHECK(std::get<FailureReport>(a).clause == "preconditions");
    const ShrinkVerdict b = check_nonterminating(oracle::pentagon_map(), 2.0, 2, 2, 4);
    REQUIRE_FALSE(granted(b));
    CHECK(std::get<FailureReport>(b).clause == "preconditions");
    const ShrinkVerdict c = check_nonterminating(oracle::rotation_map(2, 7), 1.0, 3, 2, 7);
    CHECK_FALSE(granted(c));
}

TEST_CASE("pentagon polygon and rigid rotation") {
    const ShrinkingPointCertificate c = pentagon_certificate();
    const Polygon poly = polygon(c, 64);
    CHECK(poly.vertices.size() == 5);
    CHECK(poly.sampled_cycles.size() == 64);
    CHECK(poly.planarity_defect > 0.0);
    CHECK_FALSE(poly.self_intersecting);
    for (const auto& sc : poly.sampled_cycles) {
        CHECK(sc.wrap_residual <= 1e-9);
        CHECK(sc.admissibility != AdmissibilityKind::Virtual);
    }
    CHECK(rigid_rotation_check(c, poly, 100) <= 1e-9);
    for (int j = 0; j < 5; ++j) {
        const Vector z = polygon_point(poly, 2.0 * M_PI * j / 5.0);
        CHECK(norm_inf(sub(z, poly.vertices[j])) <= 1e-12);
    }
    const double th = 1.234;
    CHECK(polygon_angle(poly, polygon_point(poly, th)) == doctest::Approx(th).epsilon(1e-9));
}

TEST_CASE("planarity of a flat set is zero") {
    std::vector<Vector> pts{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {0.3, 0.7, 1}};
    CHECK(planarity_defect(pts) <= 1e-12);
    pts.push_back({0.5, 0.5, 2});
    CHECK(planarity_defect(pts) > 0.1);
}

TEST_CASE("terminating construction on rotation maps") {
    for (auto [m, n] : {std::pair{1, 5}, std::pair{2, 5}, std::pair{1, 7}}) {
        CAPTURE(m);
        CAPTURE(n);
        const PwaMap f = oracle::rotation_map(m, n);
        const ShrinkVerdict v = check_terminating(f, -1.0, m, n);
        if (!granted(v)) FAIL(format_failure(std::get<FailureReport>(v)));
        const ShrinkingPointCertificate c = std::get<ShrinkingPointCertificate>(v);
        CHECK(c.kind == ShrinkKind::Terminating);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(c.t_at(i) - terminating_s(-0.5, i, n)) <= 1e-10);
        }
        CHECK(std::abs(c.t_at(0)) <= 1e-10);
        CHECK(std::abs(c.t_at(-1)) <= 1e-10);
        const Polygon poly = polygon(c, 16);
        REQUIRE(poly.construction_residual);
        CHECK(*poly.construction_residual <= 1e-10);
        const CorollaryReport r = corollary_check(f, -1.0, c.params);
        CHECK(r.excluded_index);
        CHECK(r.all_singular());
    }
}

TEST_CASE("terminating check rejects a non-rotation left branch") {
    const PwaMap f(Matrix{{0.5, 1}, {-0.3, 0}}, Matrix{{-1, 1}, {0.2, 0}}, {1, 0});
    const ShrinkVerdict v = check_terminating(f, -1.0, 2, 7);
    REQUIRE_FALSE(granted(v));
    CHECK(std::get<FailureReport>(v).clause == "eigenvalue_gap");
}

TEST_CASE("Newton locates the 2/7 shrinking point of fig1") {
    const MapFamily fam = builtin_family("fig1").family();
    const RotationalParams p = make_rotational_params(3, 2, 7);
    const ShrinkSearch r = find_shrinking_point(fam, p, {0.2841, 0.7583});
    CHECK(r.residual <= 1e-10);
    CHECK(r.xi[0] == doctest::Approx(oracle::kFig1Shrink27[0]).epsilon(1e-9));
    CHECK(r.xi[1] == doctest::Approx(oracle::kFig1Shrink27[1]).epsilon(1e-9));
    CHECK(granted(r.verdict));
    CHECK(shrink_residual(fam, p, r.xi) == r.residual);
}

TEST_CASE("Newton fails cleanly away from any shrinking point") {
    MapFamily fam = builtin_family("fig1").family();
    NewtonOptions opts;
    opts.max_iterations = 3;
    CHECK_THROWS_AS(find_shrinking_point(fam, make_rotational_params(3, 2, 7), {0.1, 0.3}, opts), Error);
}

TEST_CASE("quadratic fit recovers exact coefficients") {
    std::vector<double> x, y;
    for (int i = -5; i <= 5; ++i) {
        x.push_back(0.1 * i);
        y.push_back(0.5 - 2.0 * x.back() + 3.0 * x.back() * x.back());
    }
    const QuadraticFit q = fit_quadratic(x, y);
    CHECK(q.c0 == doctest::Approx(0.5));
    CHECK(q.c1 == doctest::Approx(-2.0));
    CHECK(q.c2 == doctest::Approx(3.0));
    CHECK(q.rms < 1e-12);
}
