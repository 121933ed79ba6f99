#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "dini/parser.hpp"

using namespace dini;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("precedence: power over product over sum") {
    Bindings env{{"x", 2.0}};
    CHECK_THAT(evaluate(parse("1 + 2*x^2"), env), WithinAbs(9.0, 1e-15));
    CHECK_THAT(evaluate(parse("-x^2"), env), WithinAbs(-4.0, 1e-15));
    CHECK_THAT(evaluate(parse("2*x - 3*x"), env), WithinAbs(-2.0, 1e-15));
    CHECK_THAT(evaluate(parse("12/2/3"), env), WithinAbs(2.0, 1e-15));
    CHECK_THAT(evaluate(parse("12 - 4 - 3"), env), WithinAbs(5.0, 1e-15));
}

TEST_CASE("decimals become exact rationals") {
    Expr e = parse("0.25");
    REQUIRE(e.kind() == Kind::Number);
    CHECK(e.number() == Rational(1, 4));
    Expr f = parse("2.5*x");
    CHECK(f.lhs().number() == Rational(5, 2));
}

TEST_CASE("long decimals carry their double value exactly") {
    // Too many digits for the exact base-ten route; the literal then means
    // the double it denotes, kept as an exact dyadic rational.
    const char* text = "0.00066666666666666668";
    Expr e = parse(text);
    REQUIRE(e.kind() == Kind::Number);
    Bindings none;
    CHECK(evaluate(e, none) == std::strtod(text, nullptr));
}

TEST_CASE("exponent grammar") {
    CHECK(parse("x^2").exponent() == Rational(2));
    CHECK(parse("x^(-2)").exponent() == Rational(-2));
    CHECK(parse("x^(3/4)").exponent() == Rational(3, 4));
    CHECK(parse("x^(-3/4)").exponent() == Rational(-3, 4));
    CHECK(parse("x^0.5").exponent() == Rational(1, 2));
    CHECK_THROWS_AS(parse("x^q"), ParseError);
    CHECK_THROWS_AS(parse("x^(q)"), ParseError);
    CHECK_THROWS_AS(parse("x^2^3"), ParseError);
}

TEST_CASE("whitespace is insignificant") {
    Bindings env{{"x", 1.5}, {"q", -0.5}};
    CHECK_THAT(evaluate(parse("  q^2+ x *q - 1 "), env),
               WithinAbs(0.25 - 0.75 - 1.0, 1e-15));
}

TEST_CASE("function calls require parentheses") {
    CHECK_THROWS_AS(parse("sin x"), ParseError);
    CHECK_NOTHROW(parse("sin(x)"));
    CHECK_NOTHROW(parse("sqrt(1 + q^2)"));
}

TEST_CASE("only the declared alphabet is accepted") {
    CHECK_NOTHROW(parse("x + t + p + q + pi"));
    CHECK_THROWS_AS(parse("x + y"), ParseError);
    CHECK_THROWS_AS(parse("foo(x)"), ParseError);
    CHECK_THROWS_AS(parse("u1_0"), ParseError);
}

TEST_CASE("errors carry the byte offset of the failure") {
    try {
        parse("x + y");
        FAIL("expected a throw");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
    }
    try {
        parse("x + ");
        FAIL("expected a throw");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
    }
    try {
        parse("(x + q");
        FAIL("expected a throw");
    } catch (const ParseError& e) {
        CHECK(e.offset == 6);
    }
    try {
        parse("x q");
        FAIL("expected a throw");
    } catch (const ParseError& e) {
        CHECK(e.offset == 2);
    }
}

TEST_CASE("nested expressions") {
    Bindings env{{"x", 0.3}, {"p", 1.1}, {"q", -0.7}};
    double x = 0.3, p = 1.1, q = -0.7;
    CHECK_THAT(evaluate(parse("q^2 - 2*q*sin(x) + 1 - p^2"), env),
               WithinRel(q * q - 2 * q * std::sin(x) + 1 - p * p, 1e-14));
    CHECK_THAT(evaluate(parse("2/3*(1/10)^3 - (2/3 + q^2)*p^3"), env),
               WithinRel(2.0 / 3.0 * 1e-3 - (2.0 / 3.0 + q * q) * p * p * p, 1e-14));
}

TEST_CASE("scientific notation is rejected") {
    CHECK_THROWS_AS(parse("1e-3"), ParseError);
}
