#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dini/parser.hpp"
#include "dini/taylor.hpp"

using namespace dini;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("coefficients of a separable product") {
    Expr f = parse("sin(x)*exp(p)");
    double x0 = 0.3, p0 = -0.2;
    TruncatedPoly tp = taylor_coefficients(f, {"x", x0, 2}, {"p", p0, 2});

    double e = std::exp(p0);
    double sinx[3] = {std::sin(x0), std::cos(x0), -std::sin(x0) / 2.0};
    double expp[3] = {1.0, 1.0, 0.5};
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j)
            CHECK_THAT(tp.coeff(i, j), WithinRel(sinx[i] * e * expp[j], 1e-12));
}

TEST_CASE("polynomials are reproduced exactly") {
    Expr f = parse("1 + 2*x + 3*p - x*p + x^2");
    TruncatedPoly tp = taylor_coefficients(f, {"x", 0.0, 2}, {"p", 0.0, 1});
    CHECK_THAT(tp.coeff(0, 0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(tp.coeff(1, 0), WithinAbs(2.0, 1e-14));
    CHECK_THAT(tp.coeff(0, 1), WithinAbs(3.0, 1e-14));
    CHECK_THAT(tp.coeff(1, 1), WithinAbs(-1.0, 1e-14));
    CHECK_THAT(tp.coeff(2, 0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(tp.coeff(2, 1), WithinAbs(0.0, 1e-14));

    Bindings env{{"x", 0.7}, {"p", -1.3}};
    CHECK_THAT(tp.value(0.7, -1.3), WithinRel(evaluate(f, env), 1e-13));
}

TEST_CASE("value agrees with the expansion near the centre") {
    Expr f = parse("log(1 + x^2 + p^2)");
    double x0 = 0.4, p0 = 0.1;
    TruncatedPoly tp = taylor_coefficients(f, {"x", x0, 2}, {"p", p0, 2});
    Bindings env{{"x", x0 + 0.01}, {"p", p0 - 0.02}};
    CHECK_THAT(tp.value(x0 + 0.01, p0 - 0.02), WithinAbs(evaluate(f, env), 1e-5));
    CHECK_THAT(tp.value(x0, p0), WithinRel(evaluate(f, Bindings{{"x", x0}, {"p", p0}}), 1e-14));
}

TEST_CASE("expression form evaluates like the polynomial") {
    Expr f = parse("cos(x) - p^2");
    TruncatedPoly tp = taylor_coefficients(f, {"x", 1.0, 2}, {"p", -0.5, 2});
    Expr e = tp.to_expr();
    for (double dx : {-0.2, 0.0, 0.3})
        for (double dp : {-0.1, 0.25}) {
            Bindings env{{"x", 1.0 + dx}, {"p", -0.5 + dp}};
            CHECK_THAT(evaluate(e, env), WithinAbs(tp.value(1.0 + dx, -0.5 + dp), 1e-12));
        }
}
