#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "dini/implicit_jet.hpp"
#include "dini/parser.hpp"

using namespace dini;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

static const double kPi = std::numbers::pi;

TEST_CASE("linear autonomous equation: constant resolvent slope") {
    Expr F = parse("2*p - q");
    BasePoint bp = check_base_point(F, 0.0, 1.0, 2.0, SolveFor::Q);
    ImplicitJet jet = implicit_jet(F, bp, 1, 1);
    CHECK_THAT(jet.D(0, 0), WithinAbs(2.0, 1e-15));
    CHECK_THAT(jet.D(1, 0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(jet.D(0, 1), WithinAbs(2.0, 1e-14));
    CHECK_THAT(jet.D(1, 1), WithinAbs(0.0, 1e-14));
}

TEST_CASE("circle equation resolved for p: tangential second order") {
    Expr F = parse("q^2 + p^2 - 1");
    BasePoint bp = check_base_point(F, kPi / 2, 1.0, 0.0, SolveFor::P);
    ImplicitJet jet = implicit_jet(F, bp, 1, 2);
    CHECK_THAT(jet.D(0, 0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(jet.D(0, 1), WithinAbs(0.0, 1e-14));
    CHECK_THAT(jet.D(0, 2), WithinAbs(-1.0, 1e-13));
    CHECK_THAT(jet.D(1, 0), WithinAbs(0.0, 1e-14));
    CHECK_THAT(jet.D(1, 1), WithinAbs(0.0, 1e-14));
    CHECK_THAT(jet.D(1, 2), WithinAbs(0.0, 1e-13));
}

TEST_CASE("equation already solved for q: the sweep recovers exact partials") {
    // F = -3 sin(x) p^(4/3) - q resolves exactly to g = -3 sin(x) p^(4/3),
    // so every rectangle entry is a plain partial derivative of g.
    Expr F = parse("-3*sin(x)*p^(4/3) - q");
    double q0 = -3.0 * std::sqrt(3.0) / 2.0;
    BasePoint bp = check_base_point(F, kPi / 3, 1.0, q0, SolveFor::Q);
    ImplicitJet jet = implicit_jet(F, bp, 3, 1);

    double s = std::sin(kPi / 3), c = std::cos(kPi / 3);
    CHECK_THAT(jet.D(0, 0), WithinRel(-3.0 * s, 1e-13));          // g
    CHECK_THAT(jet.D(1, 0), WithinRel(-3.0 * c, 1e-13));          // g_x     = -3/2
    CHECK_THAT(jet.D(2, 0), WithinRel(3.0 * s, 1e-13));           // g_xx    = 3 sqrt(3)/2
    CHECK_THAT(jet.D(3, 0), WithinRel(3.0 * c, 1e-12));           // g_xxx   = 3/2
    CHECK_THAT(jet.D(0, 1), WithinRel(-4.0 * s, 1e-13));          // g_p     = -2 sqrt(3)
    CHECK_THAT(jet.D(1, 1), WithinRel(-4.0 * c, 1e-13));          // g_xp    = -2
    CHECK_THAT(jet.D(2, 1), WithinRel(4.0 * s, 1e-13));           // g_xxp
    CHECK_THAT(jet.D(3, 1), WithinRel(4.0 * c, 1e-12));           // g_xxxp

    CHECK_THAT(jet.D(1, 0), WithinRel(-1.5, 1e-13));
    CHECK_THAT(jet.D(2, 0), WithinRel(3.0 * std::sqrt(3.0) / 2.0, 1e-13));
    CHECK_THAT(jet.D(3, 0), WithinRel(1.5, 1e-12));
    CHECK_THAT(jet.D(0, 1), WithinRel(-2.0 * std::sqrt(3.0), 1e-13));
}

TEST_CASE("cavity equation resolved for p") {
    double R0 = 0.1;
    Expr F = parse("2/3*(1/10)^3 - (2/3 + q^2)*p^3");
    BasePoint bp = check_base_point(F, 0.0, R0, 0.0, SolveFor::P);
    CHECK(bp.indep == "x");  // no explicit independent variable in F
    ImplicitJet jet = implicit_jet(F, bp, 1, 2);
    CHECK_THAT(jet.D(0, 0), WithinAbs(R0, 1e-15));
    CHECK_THAT(jet.D(0, 1), WithinAbs(0.0, 1e-14));
    CHECK_THAT(jet.D(0, 2), WithinRel(-R0, 1e-12));
    CHECK_THAT(jet.D(1, 0), WithinAbs(0.0, 1e-14));
}

TEST_CASE("rectangle order cap") {
    Expr F = parse("2*p - q");
    BasePoint bp = check_base_point(F, 0.0, 1.0, 2.0, SolveFor::Q);
    CHECK_THROWS_AS(implicit_jet(F, bp, 3, 2), SolveError);
    CHECK_THROWS_AS(implicit_jet(F, bp, 5, 0), SolveError);
    CHECK_NOTHROW(implicit_jet(F, bp, 3, 1));
    CHECK_NOTHROW(implicit_jet(F, bp, 0, 4));
}

TEST_CASE("sweep equals direct partials for explicit resolvents") {
    // Random F = q - g(x, p) with polynomial g: the rectangle must reproduce
    // the partial derivatives of g itself.
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> at(-0.8, 0.8);
    for (int trial = 0; trial < 25; ++trial) {
        double c[3][2];
        for (auto& row : c)
            for (double& v : row) v = coeff(rng);
        // g = sum c[i][j] x^i p^j, degree (2, 1)
        Expr g;
        bool first = true;
        for (int i = 0; i <= 2; ++i)
            for (int j = 0; j <= 1; ++j) {
                Expr term = num(Rational::from_double(c[i][j]));
                for (int r = 0; r < i; ++r) term = term * var("x");
                for (int r = 0; r < j; ++r) term = term * var("p");
                g = first ? term : g + term;
                first = false;
            }
        Expr F = var("q") - g;
        double x0 = at(rng), p0 = at(rng);
        Bindings env{{"x", x0}, {"p", p0}};
        double q0 = evaluate(g, env);
        BasePoint bp = check_base_point(F, x0, p0, q0, SolveFor::Q);
        ImplicitJet jet = implicit_jet(F, bp, 2, 2);
        Expr d = g;
        for (int i = 0; i <= 2; ++i) {
            Expr dj = d;
            for (int j = 0; j <= 2; ++j) {
                double want = evaluate(dj, env);
                INFO("trial " << trial << " entry (" << i << "," << j << ")");
                CHECK_THAT(jet.D(i, j), WithinAbs(want, 1e-9 * (1.0 + std::fabs(want))));
                dj = differentiate(dj, "p");
            }
            d = differentiate(d, "x");
        }
    }
}

TEST_CASE("resolvent formula cross-check rows agree with the sweep") {
    Expr F = parse("-3*sin(x)*p^(4/3) - q");
    double q0 = -3.0 * std::sqrt(3.0) / 2.0;
    BasePoint bp = check_base_point(F, kPi / 3, 1.0, q0, SolveFor::Q);
    ImplicitJet jet = implicit_jet(F, bp, 3, 1);
    auto rows = jet_closed_form_check(F, jet);
    REQUIRE(rows.size() == 4);  // D(1,0), D(0,1), D(2,0), D(3,0)
    for (const auto& r : rows) {
        INFO(r.label);
        CHECK(r.abs_delta <= 1e-10 * (1.0 + std::fabs(r.closed_form)));
    }

    Expr G = parse("q^2 + p^2 - 1");
    BasePoint bq = check_base_point(G, kPi / 2, 1.0, 0.0, SolveFor::P);
    ImplicitJet jq = implicit_jet(G, bq, 1, 2);
    auto qrows = jet_closed_form_check(G, jq);
    REQUIRE(qrows.size() == 3);  // D(1,0), D(0,1), D(0,2)
    for (const auto& r : qrows) {
        INFO(r.label);
        CHECK(r.abs_delta <= 1e-12);
    }
}

TEST_CASE("degenerate slot inside the sweep is refused") {
    // At q0 = 0 the circle equation cannot be resolved for q.
    Expr F = parse("q^2 + p^2 - 1");
    BasePoint forced;
    forced.x0 = kPi / 2;
    forced.p0 = 1.0;
    forced.q0 = 0.0;
    forced.mode = SolveFor::Q;
    forced.indep = "x";
    CHECK_THROWS_AS(implicit_jet(F, forced, 1, 1), DegenerateDerivative);
}
