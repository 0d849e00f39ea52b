#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/oracles.hpp"
#include "lenschain/errors.hpp"
#include "lenschain/family.hpp"
#include "lenschain/scan.hpp"

using namespace lenschain;

namespace {

MapFamily tongue_family() {
    FamilySpec spec = builtin_family("fig1");
    set_box(spec, {0.275, 0.295, 0.65, 0.9});
    return spec.family();
}

const TongueGrid& small_grid() {
    static const TongueGrid g = scan_tongues(tongue_family(), 40, 40);
    return g;
}

}  // namespace

TEST_CASE("cell classification of simple maps") {
    ScanOptions opts;
    // Stable focus on the left, right branch irrelevant.
    const PwaMap f(Matrix{{0.5, 1}, {-0.3, 0}}, Matrix{{-0.5, 1}, {-0.3, 0}}, {1, 0});
    CHECK(classify_cell(f, -1.0, opts).label == CellLabel::FixedL);
    CHECK(classify_cell(f, 1.0, opts).label == CellLabel::FixedR);
    // Expanding in both branches: orbits escape.
    const PwaMap g(Matrix{{3, 1}, {-0.1, 0}}, Matrix{{3.5, 1}, {-0.1, 0}}, {1, 0});
    CHECK(classify_cell(g, -1.0, opts).label == CellLabel::Diverged);
}

TEST_CASE("periodic cells carry their rotation data") {
    const MapFamily fam = tongue_family();
    ScanOptions opts;
    const CellResult c = classify_cell(fam.at(0.2845, 0.80), fam.mu, opts);
    CHECK(c.label == CellLabel::Periodic);
    CHECK(c.n == 7);
    CHECK(c.m == 2);
    CHECK(c.max_multiplier < 1.0);
    CHECK(c.margin > 0.0);
}

TEST_CASE("scan is independent of the thread count") {
    ScanOptions one, many;
    many.threads = 8;
    const TongueGrid a = scan_tongues(tongue_family(), 24, 24, one);
    const TongueGrid b = scan_tongues(tongue_family(), 24, 24, many);
    CHECK(write_grid_csv(a) == write_grid_csv(b));
}

TEST_CASE("grid CSV round trip") {
    const TongueGrid& g = small_grid();
    const std::string text = write_grid_csv(g);
    const TongueGrid h = read_grid_csv(text);
    CHECK(h.width == g.width);
    CHECK(h.height == g.height);
    for (int k = 0; k < 4; ++k) CHECK(h.box[k] == doctest::Approx(g.box[k]).epsilon(1e-12));
    REQUIRE(h.cells.size() == g.cells.size());
    for (std::size_t k = 0; k < g.cells.size(); ++k) {
        CHECK(h.cells[k].label == g.cells[k].label);
        CHECK(h.cells[k].l == g.cells[k].l);
        CHECK(h.cells[k].margin == g.cells[k].margin);
    }
    CHECK(h.p1(3) == doctest::Approx(g.p1(3)).epsilon(1e-12));
    CHECK_THROWS_AS(read_grid_csv("p1,p2,label\n"), Error);
}

TEST_CASE("scan option validation") {
    CHECK_THROWS_AS(scan_tongues(tongue_family(), 0, 10), ConfigError);
    ScanOptions bad;
    bad.n_max = 0;
    CHECK_THROWS_AS(scan_tongues(tongue_family(), 4, 4, bad), ConfigError);
}

TEST_CASE("the 2/7 tongue appears with more than one l") {
    const TongueGrid& g = small_grid();
    std::set<int> ls;
    for (const CellResult& c : g.cells)
        if (c.label == CellLabel::Periodic && c.m == 2 && c.n == 7) ls.insert(c.l);
    CHECK(ls.size() >= 2);
    const auto edges = tongue_edges(g, 2, 7);
    CHECK(edges[0].size() >= 5);
    CHECK(edges[0].size() == edges[1].size());
}

TEST_CASE("width profile of two converging lines") {
    std::vector<Point2> a, b;
    for (int i = 0; i <= 100; ++i) {
        const double y = i / 100.0;
        a.push_back({-std::abs(y - 0.5) - 0.001, y});
        b.push_back({std::abs(y - 0.5) + 0.001, y});
    }
    const WidthProfile w = width_profile(a, b, 201, 0.1);
    REQUIRE(w.minima.size() == 1);
    const WidthSample& s = w.samples[w.minima[0]];
    CHECK(s.a[1] == doctest::Approx(0.5).epsilon(0.02));
    CHECK(s.width < 0.01);
    CHECK(w.max_width > 0.5);
}

TEST_CASE("tongue boundaries from an admissible seed") {
    const MapFamily fam = tongue_family();
    const RotationalParams p = make_rotational_params(3, 2, 7);
    const TongueGrid& g = small_grid();
    Point2 seed{};
    bool found = false;
    for (const CellResult& c : g.cells) {
        if (c.label == CellLabel::Periodic && c.l == 3 && c.m == 2 && c.n == 7) {
            const std::size_t k = static_cast<std::size_t>(&c - g.cells.data());
            seed = {g.p1(static_cast<int>(k % g.width)), g.p2(static_cast<int>(k / g.width))};
            found = true;
            break;
        }
    }
    REQUIRE(found);
    BoundaryOptions opts;
    opts.max_steps = 60;
    const auto curves = tongue_boundaries(fam, p, seed, opts);
    REQUIRE(curves.size() == 4);
    for (const BoundaryCurve& c : curves) {
        CHECK(!c.points.empty());
        CHECK(!c.stop_reason.empty());
        for (const CurvePoint& q : c.points) CHECK(std::abs(q.s_residual) <= 1e-10);
    }
    // The S-cycle is admissible on one side of each curve and virtual on the other.
    const SymbolSequence s = rotational(p);
    for (const BoundaryCurve& c : curves) {
        if (c.points.size() < 3) continue;
        const std::size_t k = c.points.size() / 2;
        const Point2 a = c.points[k - 1].xi, b = c.points[k + 1].xi, q = c.points[k].xi;
        const double tx = b[0] - a[0], ty = b[1] - a[1], len = std::hypot(tx, ty);
        const double h = 1e-5;
        int virtual_sides = 0;
        for (double sign : {-1.0, 1.0}) {
            const Point2 z{q[0] - sign * h * ty / len, q[1] + sign * h * tx / len};
            const CycleSolution cyc = solve_cycle(fam.at(z[0], z[1]), fam.mu, s);
            virtual_sides += cyc.admissibility.kind == AdmissibilityKind::Virtual;
        }
        CAPTURE(c.curve_id);
        CHECK(virtual_sides == 1);
    }
    const auto back = read_curve_csv(write_curve_csv(curves));
    REQUIRE(back.size() == curves.size());
    for (std::size_t i = 0; i < curves.size(); ++i) {
        CHECK(back[i].index == curves[i].index);
        CHECK(back[i].points.size() == curves[i].points.size());
    }
    CHECK_THROWS_AS(tongue_boundaries(fam, p, {0.276, 0.66}, opts), SeedNotAdmissible);
}

TEST_CASE("pipeline locates a certified 2/7 shrinking point") {
    const MapFamily fam = tongue_family();
    const TongueGrid g = scan_tongues(fam, 80, 80);
    const auto cands = locate_shrinking_points(fam, g, 2, 7);
    bool certified = false;
    for (const ShrinkCandidate& c : cands) {
        if (c.search && granted(c.search->verdict) && c.search->residual <= 1e-10) certified = true;
    }
    CHECK(certified);
}
