#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <optional>

#include "dini/base_point.hpp"
#include "dini/parser.hpp"

using namespace dini;
using Catch::Matchers::WithinAbs;

static const double kPi = std::numbers::pi;

TEST_CASE("a consistent anchor passes and carries its diagnostics") {
    Expr F = parse("2*p - q");
    BasePoint bp = check_base_point(F, 0.0, 1.0, 2.0, SolveFor::Q);
    CHECK(bp.indep == "x");
    CHECK_THAT(bp.residual, WithinAbs(0.0, 1e-15));
    CHECK_THAT(bp.solved_partial, WithinAbs(-1.0, 1e-15));
}

TEST_CASE("an off-surface anchor is rejected with the residual attached") {
    Expr F = parse("2*p - q");
    try {
        check_base_point(F, 0.0, 1.0, 2.5, SolveFor::Q);
        FAIL("expected a throw");
    } catch (const ResidualTooLarge& e) {
        CHECK_THAT(e.residual, WithinAbs(0.5, 1e-15));
        CHECK(e.tolerance < 1e-7);
    }
}

TEST_CASE("a vanishing resolving partial is rejected by slot") {
    Expr F = parse("q^2 + p^2 - 1");
    try {
        check_base_point(F, kPi / 2, 1.0, 0.0, SolveFor::Q);
        FAIL("expected a throw");
    } catch (const DegenerateDerivative& e) {
        CHECK(e.partial == "dF/dq");
        CHECK_THAT(e.value, WithinAbs(0.0, 1e-15));
    }
    BasePoint bp = check_base_point(F, kPi / 2, 1.0, 0.0, SolveFor::P);
    CHECK_THAT(bp.solved_partial, WithinAbs(2.0, 1e-12));
}

TEST_CASE("independent variable is inferred and policed") {
    CHECK(check_base_point(parse("q - p"), 0.0, 1.0, 1.0, SolveFor::Q).indep == "x");
    CHECK(check_base_point(parse("q - t"), 2.0, 0.0, 2.0, SolveFor::Q).indep == "t");
    CHECK_THROWS_AS(check_base_point(parse("q - t - x"), 0.0, 0.0, 0.0, SolveFor::Q),
                    UnknownVariable);
    CHECK_THROWS_AS(infer_independent(var("u1_0") - var("q")), UnknownVariable);
}

TEST_CASE("missing coordinate: simple sign-change root") {
    Expr F = parse("2*p - q");
    double q0 = solve_missing_coordinate(F, 0.0, 1.0, std::nullopt, 0.0, 5.0);
    CHECK_THAT(q0, WithinAbs(2.0, 1e-12));

    double p0 = solve_missing_coordinate(F, 0.0, std::nullopt, 3.0, -4.0, 4.0);
    CHECK_THAT(p0, WithinAbs(1.5, 1e-12));
}

TEST_CASE("missing coordinate: tangential root is still found") {
    Expr F = parse("q^2 + p^2 - 1");
    double q0 = solve_missing_coordinate(F, kPi / 2, 1.0, std::nullopt, -1.0, 1.0);
    CHECK_THAT(q0, WithinAbs(0.0, 1e-4));

    Expr G = parse("2/3*(1/10)^3 - (2/3 + q^2)*p^3");
    double qb = solve_missing_coordinate(G, 0.0, 0.1, std::nullopt, -0.5, 0.5);
    CHECK_THAT(qb, WithinAbs(0.0, 1e-3));
}

TEST_CASE("missing coordinate: no root in the bracket") {
    Expr F = parse("2*p - q");
    CHECK_THROWS_AS(solve_missing_coordinate(F, 0.0, 1.0, std::nullopt, 5.0, 9.0), SolveError);
    try {
        solve_missing_coordinate(F, 0.0, 1.0, std::nullopt, 5.0, 9.0);
        FAIL("expected a throw");
    } catch (const SolveError& e) {
        CHECK(e.fault == SolveFault::NoRoot);
    }
}

TEST_CASE("missing coordinate: exactly one slot may be free") {
    Expr F = parse("2*p - q");
    CHECK_THROWS_AS(
        solve_missing_coordinate(F, std::nullopt, std::nullopt, 2.0, -1.0, 1.0), SolveError);
    CHECK_THROWS_AS(solve_missing_coordinate(F, 0.0, 1.0, 2.0, -1.0, 1.0), SolveError);
}

TEST_CASE("domain holes inside the bracket are skipped, not fatal") {
    Expr F = parse("log(p) - q");  // p <= 0 is out of domain
    double p0 = solve_missing_coordinate(F, 0.0, std::nullopt, 0.0, -1.0, 3.0);
    CHECK_THAT(p0, WithinAbs(1.0, 1e-10));
}
