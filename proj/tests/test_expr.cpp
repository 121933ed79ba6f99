#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "dini/expr.hpp"
#include "dini/parser.hpp"

using namespace dini;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("evaluation of core forms") {
    Bindings env{{"x", 0.7}, {"p", -1.2}};
    CHECK_THAT(evaluate(parse("x + 2*p"), env), WithinAbs(0.7 - 2.4, 1e-15));
    CHECK_THAT(evaluate(parse("sin(x)*cos(x)"), env),
               WithinAbs(std::sin(0.7) * std::cos(0.7), 1e-15));
    CHECK_THAT(evaluate(parse("exp(x) - log(x)"), env),
               WithinAbs(std::exp(0.7) - std::log(0.7), 1e-15));
    CHECK_THAT(evaluate(parse("pi"), env), WithinAbs(std::numbers::pi, 1e-15));
    CHECK_THAT(evaluate(parse("x^(-2)"), env), WithinRel(std::pow(0.7, -2.0), 1e-14));
    CHECK_THAT(evaluate(parse("x^(3/4)"), env), WithinRel(std::pow(0.7, 0.75), 1e-14));
}

TEST_CASE("evaluation faults") {
    Bindings env{{"x", -1.0}};
    CHECK_THROWS_AS(evaluate(parse("q"), env), EvalError);
    CHECK_THROWS_AS(evaluate(parse("log(x)"), env), EvalError);
    CHECK_THROWS_AS(evaluate(parse("sqrt(x)"), env), EvalError);
    CHECK_THROWS_AS(evaluate(parse("1/(x+1)"), env), EvalError);
    CHECK_THROWS_AS(evaluate(parse("x^(1/2)"), env), EvalError);

    try {
        evaluate(parse("q"), env);
        FAIL("expected a throw");
    } catch (const EvalError& e) {
        CHECK(e.fault == EvalFault::UnboundVariable);
    }
}

TEST_CASE("integer powers evaluate without std::pow corner cases") {
    Bindings env{{"x", -2.0}};
    CHECK_THAT(evaluate(parse("x^3"), env), WithinAbs(-8.0, 1e-15));
    CHECK_THAT(evaluate(parse("x^0"), env), WithinAbs(1.0, 1e-15));
    CHECK_THAT(evaluate(parse("x^(-2)"), env), WithinAbs(0.25, 1e-15));
}

TEST_CASE("differentiate: polynomial and chain rules") {
    Bindings env{{"x", 1.3}};
    auto d = [&](const char* f, const char* df) {
        Expr got = differentiate(parse(f), "x");
        CHECK_THAT(evaluate(got, env), WithinRel(evaluate(parse(df), env), 1e-12));
    };
    d("x^3 + 2*x", "3*x^2 + 2");
    d("sin(2*x)", "2*cos(2*x)");
    d("exp(x^2)", "2*x*exp(x^2)");
    d("log(x^2 + 1)", "2*x/(x^2 + 1)");
    d("sqrt(x)", "1/(2*sqrt(x))");
    d("x/(1 + x)", "1/(1 + x)^2");
    d("x^(3/4)", "3/4*x^(-1/4)");
}

TEST_CASE("derivative of an expression without the variable is zero") {
    Expr e = parse("sin(p)*q + pi");
    CHECK(differentiate(e, "x").is_number(0));
}

TEST_CASE("simplify folds rational constants exactly") {
    CHECK(to_text(simplify(parse("1/2 + 1/3"))) == "5/6");
    CHECK(to_text(simplify(parse("2^10"))) == "1024");
    CHECK(to_text(simplify(parse("0.125*8"))) == "1");
    CHECK(to_text(simplify(parse("(2/3)^(-2)"))) == "9/4");
}

TEST_CASE("simplify applies neutral elements without changing values") {
    CHECK(to_text(simplify(parse("x + 0"))) == "x");
    CHECK(to_text(simplify(parse("1*x"))) == "x");
    CHECK(to_text(simplify(parse("x - x"))) == "0");
    CHECK(to_text(simplify(parse("x^1"))) == "x");
    CHECK(to_text(simplify(parse("x^0"))) == "1");
    CHECK(to_text(simplify(parse("0/x"))) == "0");
    CHECK(to_text(simplify(parse("sin(0) + cos(0)"))) == "1");
    CHECK(to_text(simplify(parse("log(1) + sqrt(1)"))) == "1");
}

TEST_CASE("simplify keeps overflowing folds symbolic") {
    Expr huge = num(INT64_MAX / 2) * num(INT64_MAX / 2);
    Expr s = simplify(huge);
    REQUIRE(s.kind() == Kind::Mul);
    CHECK_THAT(evaluate(s, {}), WithinRel(std::pow(static_cast<double>(INT64_MAX / 2), 2.0), 1e-12));
}

TEST_CASE("substitute replaces every occurrence") {
    Expr e = parse("q^2 + sin(q) - x");
    Expr r = substitute(e, "q", parse("2*x"));
    Bindings env{{"x", 0.4}};
    CHECK_THAT(evaluate(r, env),
               WithinAbs(0.64 + std::sin(0.8) - 0.4, 1e-15));
    CHECK(variables(r) == std::set<std::string>{"x"});
}

TEST_CASE("variables reports the exact free set") {
    CHECK(variables(parse("x*q + pi")) == std::set<std::string>{"q", "x"});
    CHECK(variables(parse("1 + 2")).empty());
}

TEST_CASE("same distinguishes structure, not value") {
    CHECK(same(parse("x + q"), parse("x + q")));
    CHECK_FALSE(same(parse("x + q"), parse("q + x")));
    CHECK_FALSE(same(parse("x^2"), parse("x*x")));
}

TEST_CASE("printer and parser round-trip") {
    const char* cases[] = {
        "x + q",        "x - (q - 1)",    "2*(x + 1)",      "x/(q*p)",
        "-x^2",         "(x + 1)^3",      "q^(-2)",         "p^(3/4)",
        "sin(x)*cos(q)", "exp(-x) + log(x)", "sqrt(x + 1)",  "pi/2 - x",
        "1/2*x",        "-(x + q)",       "x - q - p",      "x/q/p",
    };
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(0.3, 1.7);
    for (const char* c : cases) {
        Expr e = parse(c);
        Expr back = parse(to_text(e));
        for (int i = 0; i < 5; ++i) {
            Bindings env{{"x", dist(rng)}, {"q", dist(rng)}, {"p", dist(rng)}, {"t", dist(rng)}};
            CHECK_THAT(evaluate(back, env), WithinRel(evaluate(e, env), 1e-14));
        }
    }
}

TEST_CASE("printer respects precedence and associativity") {
    CHECK(to_text(parse("(x - q) - p")) == "x - q - p");
    CHECK(to_text(parse("x - (q - p)")) == "x - (q - p)");
    CHECK(to_text(parse("(x/q)/p")) == "x/q/p");
    CHECK(to_text(parse("x/(q/p)")) == "x/(q/p)");
    CHECK(to_text(parse("(x + q)*p")) == "(x + q)*p");
    CHECK(to_text(num(-1, 2) * var("x")) == "(-1/2)*x");
    CHECK(to_text(pow(var("x"), Rational(-2))) == "x^(-2)");
}
