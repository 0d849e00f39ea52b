#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/identity_suite.hpp"
#include "../support/oracles.hpp"
#include "lenschain/cycles.hpp"
#include "lenschain/errors.hpp"
#include "lenschain/mapio.hpp"

using namespace lenschain;

TEST_CASE("cycle identities over randomised instances") {
    const oracle::IdentitySuiteReport r = oracle::run_identity_suite(7);
    for (const auto& note : r.notes) MESSAGE(note);
    MESSAGE("flip identity " << r.max_flip_identity_err << ", cyclic det " << r.max_cyclic_det_err << ", stacked "
                             << r.max_stacked_err << ", min lsq residual " << r.min_lsq_residual);
    CHECK(r.instances >= 200);
    CHECK(r.singular_branch_instances >= 50);
    CHECK(r.max_flip_identity_err <= 1e-8);
    CHECK(r.max_cyclic_det_err <= 1e-8);
    CHECK(r.p_independent_of_s0);
    CHECK(r.m_columns_shared);
    CHECK(r.max_stacked_err <= 1e-8);
    CHECK(r.on_manifold >= 50);
    CHECK(r.off_manifold >= 50);
    CHECK(r.biconditional_failures == 0);
    CHECK(r.no_solution >= 50);
    CHECK(r.no_solution_failures == 0);
}

TEST_CASE("solved cycle is a fixed point of the n-th iterate") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 100; ++k) {
        const PwaMap f = oracle::random_map(rng, 2 + k % 4);
        const SymbolSequence s = oracle::random_sequence(rng, 1 + k % 9);
        CycleSolution c;
        try {
            c = solve_cycle(f, 1.0, s);
        } catch (const SingularSystem&) {
            continue;
        }
        CHECK(c.wrap_residual <= 1e-9);
        const auto orbit = orbit_under(f, 1.0, s, c.points[0]);
        CHECK(orbit.size() == s.size() + 1);
        CHECK(norm_inf(sub(orbit.back(), orbit.front())) <= 1e-9 * std::max(1.0, norm_inf(orbit.front())));
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(c.s_values[i] == c.points[i][0]);
    }
}

TEST_CASE("admissibility classification") {
    const SymbolSequence s = SymbolSequence::parse("LRR");
    std::vector<Vector> pts{{-1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}};
    auto a = admissibility(pts, s, 1e-8);
    CHECK(a.kind == AdmissibilityKind::Admissible);
    CHECK(a.margin == doctest::Approx(1.0));
    pts[1][0] = 1e-12;
    a = admissibility(pts, s, 1e-8);
    CHECK(a.kind == AdmissibilityKind::Boundary);
    CHECK(a.boundary == std::vector<std::size_t>{1});
    CHECK(a.ok());
    pts[2][0] = -0.5;
    a = admissibility(pts, s, 1e-8);
    CHECK(a.kind == AdmissibilityKind::Virtual);
    CHECK(a.violating == std::vector<std::size_t>{2});
}

TEST_CASE("pentagon solution nature and CSV round trip") {
    const PwaMap f = oracle::pentagon_map();
    const SymbolSequence check = SymbolSequence::parse("RRRLR");  // S[2,2,5] = LRRLR flipped at 0
    const CycleSolution c = solve_cycle(f, 1.0, check);
    CHECK(std::abs(c.points[0][0]) < 1e-9);
    CHECK(c.points[0][1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(c.points[0][2] == doctest::Approx(1.5).epsilon(1e-12));
    const std::string text = write_cycle_csv(c);
    const CycleTable t = read_cycle_csv(text);
    CHECK(t.sequence == check);
    CHECK(t.mu == 1.0);
    CHECK(t.det_P == c.det_P);
    REQUIRE(t.points.size() == c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) CHECK(t.points[i] == c.points[i]);

    const SymbolSequence s = SymbolSequence::parse("LRRLR");
    const SolutionNature nat = solution_nature(f, 1.0, s);
    CHECK(nat.singular_IminusM);
    CHECK(nat.singular_P);
    CHECK(nat.cell == SolutionCell::AffineFamily);
    const AffineFamilySolution fam = affine_family(f, 1.0, s);
    CHECK(fam.residual < 1e-9);
    CHECK(fam.directions.size() >= 1);
    CHECK_THROWS_AS(solve_cycle(f, 1.0, s), SingularSystem);
}

TEST_CASE("solution nature with mu = 0 is degenerate") {
    const PwaMap f = oracle::pentagon_map();
    CHECK(solution_nature(f, 0.0, SymbolSequence::parse("LR")).cell == SolutionCell::Degenerate);
}

TEST_CASE("malformed cycle CSV is rejected") {
    CHECK_THROWS(read_cycle_csv("index,s,x1\n0,abc,1\n"));
}
