#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "lenschain/errors.hpp"
#include "lenschain/family.hpp"
#include "lenschain/shrink.hpp"

using namespace lenschain;

namespace {

const MapFamily& fig1() {
    static const MapFamily fam = builtin_family("fig1").family();
    return fam;
}

const Unfolding& fig1_unfolding() {
    static const Unfolding u =
        unfold(fig1(), {oracle::kFig1Shrink27[0], oracle::kFig1Shrink27[1]}, make_rotational_params(3, 2, 7));
    return u;
}

}  // namespace

TEST_CASE("tangency coefficients are negative and match the k-formulas") {
    const Unfolding& u = fig1_unfolding();
    CHECK(u.g1_coeff < 0.0);
    CHECK(u.g2_coeff < 0.0);
    CHECK(u.g1_coeff == doctest::Approx(u.g1_predicted).epsilon(1e-2));
    CHECK(u.g2_coeff == doctest::Approx(u.g2_predicted).epsilon(1e-2));
    // Both curves are tangent to a chart axis at the origin.
    CHECK(std::abs(u.g1_linear) < 1e-3);
    CHECK(std::abs(u.g2_linear) < 1e-3);
    CHECK(u.axis_residual < 1e-9);
}

TEST_CASE("k-sign pattern") {
    const Unfolding& u = fig1_unfolding();
    CHECK(u.allk_pattern);
    CHECK((u.k1 > 0) == (u.k2 > 0));
    CHECK((u.k3 > 0) != (u.k1 > 0));
    CHECK((u.k4 > 0) == (u.k1 > 0));
}

TEST_CASE("region verdicts in the two lobes") {
    const Unfolding& u = fig1_unfolding();
    REQUIRE(!u.psi1.empty());
    REQUIRE(!u.psi2.empty());
    for (const RegionProbe& r : u.psi1) {
        CHECK(r.s.admissibility != AdmissibilityKind::Virtual);
        CHECK(r.check.admissibility != AdmissibilityKind::Virtual);
        CHECK(r.hat.admissibility == AdmissibilityKind::Virtual);
        // Exactly one of the coexisting pair is stable; the unstable-multiplier
        // counts differ by an odd number.
        CHECK(r.s.stable != r.check.stable);
        CHECK((r.s.real_multipliers_above_one + r.check.real_multipliers_above_one) % 2 == 1);
    }
    for (const RegionProbe& r : u.psi2) {
        CHECK(r.s.admissibility != AdmissibilityKind::Virtual);
        CHECK(r.hat.admissibility != AdmissibilityKind::Virtual);
        CHECK(r.check.admissibility == AdmissibilityKind::Virtual);
    }
}

TEST_CASE("virtual curves follow the predicted slopes") {
    const RotationalParams p = make_rotational_params(3, 2, 7);
    const auto idx = virtual_curve_indices(p);
    CHECK(idx == std::vector<long long>{1, 4, 5});
    for (long long i : idx) {
        const VirtualCurve v =
            virtual_curves(fig1(), {oracle::kFig1Shrink27[0], oracle::kFig1Shrink27[1]}, p, i, 1e-3);
        CAPTURE(i);
        CHECK(v.fitted_slope == doctest::Approx(v.predicted_slope).epsilon(1e-2));
        CHECK(v.samples.size() == v.verdicts.size());
    }
}

TEST_CASE("unfold refuses points that are not shrinking points") {
    CHECK_THROWS_AS(unfold(fig1(), {0.28, 0.7}, make_rotational_params(3, 2, 7)), DegenerateUnfolding);
}

TEST_CASE("report formatting") { CHECK(format_unfolding(fig1_unfolding()).find("k1") != std::string::npos); }
