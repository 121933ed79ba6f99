#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dini {

/// Exact rational number on int64, kept in lowest terms with a positive denominator.
/// Arithmetic uses 128-bit intermediates and throws std::overflow_error when a
/// reduced result no longer fits; callers that fold constants catch and keep the
/// expression symbolic instead.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        norm(n, d);
    }

    long long num() const { return num_; }
    long long den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    bool negative() const { return num_ < 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

    /// Integer power; exponent magnitude is capped to keep folded constants tame.
    Rational pow_int(long long e) const {
        if (e == 0) return Rational(1);
        if (std::llabs(e) > 64) throw std::overflow_error("rational power too large");
        Rational base = e > 0 ? *this : Rational(den_, num_);  // throws on 0^-k via ctor
        Rational acc(1);
        for (long long i = 0; i < std::llabs(e); ++i) acc = acc * base;
        return acc;
    }

    /// Exact conversion when the double's dyadic form fits, otherwise the closest
    /// continued-fraction approximant (error below ~1e-18 relative).
    static Rational from_double(double v) {
        if (!std::isfinite(v)) throw std::domain_error("rational from non-finite double");
        if (v == 0.0) return Rational(0);
        int e = 0;
        double m = std::frexp(v, &e);       // v = m * 2^e, |m| in [0.5, 1)
        long long n = static_cast<long long>(std::ldexp(m, 53));  // exact 53-bit integer
        e -= 53;
        while (n != 0 && (n & 1) == 0) { n >>= 1; ++e; }
        int bits = 0;
        for (long long a = std::llabs(n); a != 0; a >>= 1) ++bits;
        if (e >= 0) {
            if (bits + e <= 62) return Rational(n << e);
        } else if (-e <= 62) {
            return Rational(n, 1ll << -e);
        }
        return approx(v);
    }

    std::string str() const {
        return is_integer() ? std::to_string(num_)
                            : std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    using i128 = __int128;

    static Rational make(i128 n, i128 d) {
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        constexpr i128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational overflow");
        Rational r;
        r.num_ = static_cast<long long>(n);
        r.den_ = static_cast<long long>(d);
        return r;
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    static Rational approx(double v) {
        // Continued fractions with denominators capped at ~2^31.
        double x = v;
        long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
        for (int i = 0; i < 64; ++i) {
            double fl = std::floor(x);
            if (fl > 9e17 || fl < -9e17) break;
            long long a = static_cast<long long>(fl);
            long long p2 = a * p1 + p0, q2 = a * q1 + q0;
            if (q2 > (1ll << 31)) break;
            p0 = p1; q0 = q1; p1 = p2; q1 = q2;
            double frac = x - fl;
            if (frac < 1e-18) break;
            x = 1.0 / frac;
        }
        if (q1 == 0) throw std::overflow_error("rational approximation failed");
        return Rational(p1, q1);
    }

    void norm(long long n, long long d) {
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        num_ = n;
        den_ = d;
    }

    long long num_, den_;
};

}  // namespace dini
