#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "lenschain/errors.hpp"
#include "lenschain/expr.hpp"
#include "lenschain/family.hpp"
#include "lenschain/mapio.hpp"

using namespace lenschain;

TEST_CASE("expression grammar") {
    CHECK(Expression::parse("1 + 2 * 3").evaluate() == 7.0);
    CHECK(Expression::parse("-2^2").evaluate() == -4.0);
    CHECK(Expression::parse("(1 - 3) / 4").evaluate() == -0.5);
    CHECK(Expression::parse("p1 * p2 + p2").evaluate(2, 3) == 9.0);
    CHECK(Expression::parse("cos(2*pi*p1)").evaluate(0.5, 0) == doctest::Approx(-1.0));
    CHECK(Expression::parse("sin(pi/2)").evaluate() == doctest::Approx(1.0));
    CHECK(Expression::parse("p2^-2").evaluate(0, 2) == doctest::Approx(0.25));
    CHECK(Expression::parse("1").same_program(Expression::parse("1.0")));
    CHECK_FALSE(Expression::parse("p1").same_program(Expression::parse("p2")));
    CHECK(Expression::parse("p1 + 1").depends_on_parameters());
    CHECK_FALSE(Expression::parse("pi").depends_on_parameters());
    CHECK(evaluate_constant("28/87") == 28.0 / 87.0);
}

TEST_CASE("expression errors carry positions") {
    try {
        Expression::parse("1 + * 2", 4, 10);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(e.column() >= 10);
    }
    CHECK_THROWS_AS(Expression::parse("foo(1)"), ParseError);
    CHECK_THROWS_AS(Expression::parse("(1 + 2"), ParseError);
    CHECK_THROWS_AS(Expression::parse(""), ParseError);
    CHECK_THROWS_AS(Expression::parse("1/p1").evaluate_checked(0, 0), EvalError);
    CHECK(std::isinf(Expression::parse("1/p1").evaluate(0, 0)));
}

TEST_CASE("map config round-trips bit-for-bit") {
    std::mt19937_64 rng(41);
    for (int k = 0; k < 40; ++k) {
        const PwaMap f = oracle::random_map(rng, 2 + k % 4);
        const MapConfig c = parse_map_config(format_map_config(f, 0.25 * k));
        CHECK(c.map.left() == f.left());
        CHECK(c.map.right() == f.right());
        CHECK(c.map.b() == f.b());
        REQUIRE(c.mu);
        CHECK(*c.mu == 0.25 * k);
    }
}

TEST_CASE("map config with fractions") {
    const MapConfig c = parse_map_config(
        "# pentagon example\nN = 3\nA_L = 0, 1, 0, 1, 0, 1, 28/87, 0, 0\nA_R = -23/14, 1, 0, 0, 0, 1, 3/2, 0, 0\nb = 1, 0, 0\n");
    const PwaMap f = oracle::pentagon_map();
    CHECK(c.map.left() == f.left());
    CHECK(c.map.right() == f.right());
    CHECK_FALSE(c.mu);
}

TEST_CASE("map config errors") {
    CHECK_THROWS_AS(parse_map_config("N = 2\nA_L = 1, 0, 0, 1\nA_R = 2, 0, 0, 2\nb = 1, 0\n"), ContinuityViolated);
    CHECK_THROWS_AS(parse_map_config("N = 2\nA_L = 1, 0, 0\nA_R = 2, 0, 0, 1\nb = 1, 0\n"), Error);
    CHECK_THROWS_AS(parse_map_config("N = 2\nA_L = 1, 0, 0, 1\nb = 1, 0\n"), Error);
    CHECK_THROWS_AS(parse_map_config("N = 2\nA_L 1, 0, 0, 1\n"), ParseError);
    CHECK_THROWS_AS(load_map_config("/nonexistent/file.map"), ConfigError);
}

TEST_CASE("format_double is lossless") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double x = g(rng);
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("built-in family") {
    const FamilySpec spec = builtin_family("fig1");
    CHECK(spec.n == 2);
    const PwaMap f = spec.instantiate(0.3, 0.8);
    CHECK(f.left()(0, 0) == doctest::Approx(1.2 * std::cos(2 * M_PI * 0.3)));
    CHECK(f.right()(0, 0) == doctest::Approx(2.0 / 0.8 * std::cos(2 * M_PI * 0.3)));
    CHECK(f.right()(1, 0) == doctest::Approx(-1.0 / 0.64));
    CHECK(f.left()(1, 0) == doctest::Approx(-9.0 / 25.0));
    CHECK_THROWS_AS(builtin_family("nope"), ConfigError);
    const MapFamily fam = spec.family();
    CHECK(fam.contains(spec.box[0], spec.box[2]));
    CHECK_FALSE(fam.contains(spec.box[1] + 1.0, spec.box[2]));
}

TEST_CASE("family files") {
    const FamilySpec spec = parse_family(
        "N = 2\nA_L = 6/5*cos(2*pi*p1), 1, -9/25, 0\nA_R = 2/p2*cos(2*pi*p1), 1, -1/p2^2, 0\nb = 1, 0\nmu = 1\n"
        "box = 0.275, 0.295, 0.65, 0.9\n");
    CHECK(spec.box[3] == 0.9);
    const PwaMap f = spec.instantiate(0.28, 0.75);
    const PwaMap g = builtin_family("fig1").instantiate(0.28, 0.75);
    CHECK(f.left() == g.left());
    CHECK(f.right() == g.right());
    CHECK_THROWS_AS(parse_family("N = 2\nA_L = p1, 1, 0, 0\nA_R = p2, 2, 0, 0\nb = 1, 0\n"), ContinuityViolated);
    CHECK_THROWS_AS(parse_family("N = 2\nA_L = 1, 1, 0, 0\nA_R = 1/p2, 1, 0, 0\nb = 1, 0\nbox = 0, 1, 0, 1\n"),
                    EvalError);
    CHECK_THROWS_AS(parse_family("N = 2\nA_L = 1, 1, 0, q\nA_R = 1, 1, 0, q\nb = 1, 0\n"), ParseError);
}
