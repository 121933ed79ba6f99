#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>

#include "dini/rational.hpp"

using dini::Rational;

TEST_CASE("construction reduces to lowest terms with positive denominator") {
    Rational r(6, -4);
    CHECK(r.num() == -3);
    CHECK(r.den() == 2);
    CHECK(Rational(0, 7) == Rational(0));
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("field operations are exact") {
    Rational a(1, 3), b(1, 6);
    CHECK(a + b == Rational(1, 2));
    CHECK(a - b == Rational(1, 6));
    CHECK(a * b == Rational(1, 18));
    CHECK(a / b == Rational(2));
    CHECK(-a == Rational(-1, 3));
    CHECK_THROWS_AS(a / Rational(0), std::domain_error);
}

TEST_CASE("arithmetic that leaves 64 bits throws instead of wrapping") {
    Rational big(INT64_MAX / 2, 1);
    CHECK_THROWS_AS(big * Rational(8), std::overflow_error);
    Rational dense(1, INT64_MAX / 2);
    CHECK_THROWS_AS(dense * dense, std::overflow_error);
}

TEST_CASE("integer powers") {
    CHECK(Rational(2, 3).pow_int(3) == Rational(8, 27));
    CHECK(Rational(2, 3).pow_int(-2) == Rational(9, 4));
    CHECK(Rational(5).pow_int(0) == Rational(1));
    CHECK_THROWS_AS(Rational(0).pow_int(-1), std::domain_error);
    CHECK_THROWS_AS(Rational(10).pow_int(40), std::overflow_error);
}

TEST_CASE("from_double is exact for representable dyadics") {
    CHECK(Rational::from_double(0.5) == Rational(1, 2));
    CHECK(Rational::from_double(-3.25) == Rational(-13, 4));
    CHECK(Rational::from_double(123456789.0) == Rational(123456789));
    CHECK(Rational::from_double(0.0) == Rational(0));
    CHECK(Rational::from_double(1e15) == Rational(1000000000000000));
}

TEST_CASE("from_double approximates non-dyadics tightly") {
    double v = 0.1;
    Rational r = Rational::from_double(v);
    CHECK(std::abs(r.to_double() - v) < 1e-15);
}

TEST_CASE("text form") {
    CHECK(Rational(7).str() == "7");
    CHECK(Rational(-7).str() == "-7");
    CHECK(Rational(3, 4).str() == "3/4");
    CHECK(Rational(-3, 4).str() == "-3/4");
}

TEST_CASE("ordering helpers") {
    CHECK(Rational(-1, 2).negative());
    CHECK_FALSE(Rational(1, 2).negative());
    CHECK(Rational(0).is_zero());
    CHECK(Rational(4, 2).is_integer());
    CHECK_FALSE(Rational(1, 2).is_integer());
}
