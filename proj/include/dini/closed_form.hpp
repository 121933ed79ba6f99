#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dini/error.hpp"
#include "dini/expr.hpp"
#include "dini/local_ode.hpp"

namespace dini {

/// Elementary closed form  y(x) = sum_k poly[k] x^k + c0 exp(d0 x).
/// Everything the local solvers produce fits this shape (polynomial degree <= 4).
struct ClosedFormSolution {
    std::string indep = "x";
    std::vector<double> poly;   // ascending powers
    double c0 = 0.0, d0 = 0.0;  // exponential part c0 * exp(d0 * x)
    double x0 = 0.0, p0 = 0.0, q0 = 0.0;  // base data it was built from
    double integration_constant = 0.0;

    double a0() const { return poly.empty() ? 0.0 : poly[0]; }
    double b0() const { return poly.size() > 1 ? poly[1] : 0.0; }

    double value(double x) const {
        double acc = 0.0;
        for (std::size_t k = poly.size(); k-- > 0;) acc = acc * x + poly[k];
        if (c0 != 0.0) acc += c0 * std::exp(d0 * x);
        return acc;
    }

    double derivative(double x) const { return nth_derivative(1, x); }

    double nth_derivative(int k, double x) const {
        double acc = 0.0;
        for (std::size_t j = poly.size(); j-- > static_cast<std::size_t>(k);) {
            double falling = 1.0;
            for (int i = 0; i < k; ++i) falling *= static_cast<double>(j - i);
            acc = acc * x + falling * poly[j];
        }
        if (c0 != 0.0) acc += c0 * std::pow(d0, k) * std::exp(d0 * x);
        return acc;
    }

    Expr to_expr() const {
        Expr acc;
        bool first = true;
        for (std::size_t k = 0; k < poly.size(); ++k) {
            if (poly[k] == 0.0) continue;
            Expr term = num(Rational::from_double(poly[k]));
            if (k == 1) term = term * var(indep);
            else if (k > 1) term = term * pow(var(indep), Rational(static_cast<long long>(k)));
            acc = first ? term : acc + term;
            first = false;
        }
        if (c0 != 0.0) {
            Expr term = num(Rational::from_double(c0)) *
                        exp(num(Rational::from_double(d0)) * var(indep));
            acc = first ? term : acc + term;
            first = false;
        }
        return simplify(first ? num(0) : acc);
    }
};

namespace detail {

inline void trim_poly(std::vector<double>& p) {
    while (!p.empty() && p.back() == 0.0) p.pop_back();
}

// Rewrites sum_k a[k] (x - x0)^k in plain powers of x.
inline std::vector<double> unshift_poly(const std::vector<double>& a, double x0) {
    std::vector<double> out(a.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] == 0.0) continue;
        double binom = 1.0;  // C(k, i) built incrementally
        double shift = 1.0;  // (-x0)^{k-i} built from the top
        std::vector<double> pw(k + 1);
        pw[k] = 1.0;
        for (std::size_t i = k; i-- > 0;) pw[i] = pw[i + 1] * -x0;
        for (std::size_t i = 0; i <= k; ++i) {
            out[i] += a[k] * binom * pw[i];
            binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
        }
        (void)shift;
    }
    return out;
}

}  // namespace detail

/// Integrates  y' = sum alpha_k (x - x0)^k + beta (y - p0),  y(x0) = p0.
/// beta = 0: direct antiderivative.  Otherwise a polynomial particular solution
/// plus the matched multiple of exp(beta x).
inline ClosedFormSolution solve_normal_form(const NormalForm& nf) {
    constexpr double kBetaFloor = 1e-12;

    ClosedFormSolution sol;
    sol.indep = nf.indep;
    sol.x0 = nf.x0;
    sol.p0 = nf.p0;
    sol.q0 = nf.q0;

    // Forcing r(x) = sum alpha_k (x - x0)^k - beta p0 in plain powers.
    std::vector<double> r = detail::unshift_poly(nf.alpha, nf.x0);
    if (r.empty()) r.push_back(0.0);
    r[0] -= nf.beta * nf.p0;
    detail::trim_poly(r);

    if (std::fabs(nf.beta) <= kBetaFloor) {
        // y = p0 + int_{x0}^x r
        sol.poly.assign(r.size() + 1, 0.0);
        for (std::size_t k = 0; k < r.size(); ++k) sol.poly[k + 1] = r[k] / (k + 1);
        double at_x0 = 0.0;
        for (std::size_t k = sol.poly.size(); k-- > 1;) at_x0 = (at_x0 + sol.poly[k]) * nf.x0;
        sol.poly[0] = nf.p0 - at_x0;
        sol.integration_constant = sol.poly[0];
        detail::trim_poly(sol.poly);
        return sol;
    }

    // Particular polynomial Y with Y' - beta Y = r, then c e^{beta x} on top.
    std::vector<double> Y(r.size(), 0.0);
    if (!r.empty()) {
        std::size_t d = r.size() - 1;
        Y[d] = -r[d] / nf.beta;
        for (std::size_t k = d; k-- > 0;) Y[k] = ((k + 1) * Y[k + 1] - r[k]) / nf.beta;
    }
    double Yx0 = 0.0;
    for (std::size_t k = Y.size(); k-- > 0;) Yx0 = Yx0 * nf.x0 + Y[k];

    sol.poly = std::move(Y);
    detail::trim_poly(sol.poly);
    sol.d0 = nf.beta;
    sol.c0 = (nf.p0 - Yx0) * std::exp(-nf.beta * nf.x0);
    if (sol.c0 == 0.0) sol.d0 = 0.0;
    sol.integration_constant = sol.c0;
    return sol;
}

enum class PsiPin { Value, Slope };

struct PsiBranch {
    ClosedFormSolution sol;
    std::string label;                   // "constant", "line" or "parabola"
    bool meets_base_conditions = false;  // y(x0) = p0 and y'(x0) = q0
    bool constant_branch = false;
    bool exact = true;                   // no unmatched cubic remainder
    double remainder_cubic = 0.0;
};

namespace detail {

inline bool nearly(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * (1.0 + std::max(std::fabs(a), std::fabs(b)));
}

// Real roots of c2 v^2 + c1 v + c0 = 0, ascending; degenerate c2 handled as linear.
inline std::vector<double> real_quadratic_roots(double c2, double c1, double c0, double tol) {
    std::vector<double> out;
    double scale = std::max({std::fabs(c2), std::fabs(c1), std::fabs(c0)});
    if (scale == 0.0) return out;  // identically zero: continuum, handled by caller
    if (std::fabs(c2) <= tol * scale) {
        if (std::fabs(c1) > tol * scale) out.push_back(-c0 / c1);
        return out;
    }
    double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < -tol * scale * scale) return out;
    disc = std::max(disc, 0.0);
    double s = std::sqrt(disc);
    // Citardauq for the root that would otherwise cancel.
    double r1, r2;
    if (c1 >= 0) {
        r1 = (-c1 - s) / (2.0 * c2);
        r2 = s == 0.0 ? r1 : (2.0 * c0) / (-c1 - s);
    } else {
        r1 = (-c1 + s) / (2.0 * c2);
        r2 = s == 0.0 ? r1 : (2.0 * c0) / (-c1 + s);
    }
    out.push_back(std::min(r1, r2));
    if (std::fabs(r1 - r2) > tol * (1.0 + std::fabs(r1))) out.push_back(std::max(r1, r2));
    return out;
}

}  // namespace detail

/// Enumerates the constant / line / parabola solutions of the rectangle-(<=1, <=2)
/// local model  y = sum a_ij (x - x0)^i (y' - q0)^j.
///
/// A quadratic y = A + Bx + Cx^2 turns the model into polynomial identities in x;
/// with u = B - q0 these are
///   x^0:  A = a00 - a10 x0 + (a01 - a11 x0) u + (a02 - a12 x0) u^2
///   x^1:  q0 + u = a10 + 2 a01 C + 4 a02 u C + a11 (u - 2 C x0) + a12 u (u - 4 C x0)
///   x^2:  C [1 - 4 a02 C - 2 a11 - 4 a12 u + 4 a12 x0 C] = 0
/// plus an x^3 term 4 a12 C^2 that no quadratic can cancel; branches that leave it
/// are reported with exact = false.  The x^2 identity splits the enumeration into
/// lines (C = 0) and genuine parabolas.  When the model fixes neither slope nor
/// curvature (a free parameter survives), `pin` selects which base condition
/// eliminates it: the anchor value y(x0) = p0 or the anchor slope y'(x0) = q0.
inline std::vector<PsiBranch> solve_psi_form(const PsiForm& pf, PsiPin pin = PsiPin::Value,
                                             double tol = 1e-11) {
    if (pf.m > 1 || pf.n > 2)
        throw SolveError(SolveFault::UnsupportedForm,
                         "quadratic ansatz needs a rectangle of order (<=1, <=2)");

    const double x0 = pf.x0, p0 = pf.p0, q0 = pf.q0;
    const double a00 = pf.at(0, 0), a01 = pf.at(0, 1), a02 = pf.at(0, 2);
    const double a10 = pf.at(1, 0), a11 = pf.at(1, 1), a12 = pf.at(1, 2);
    const double scale = 1.0 + std::fabs(x0) + std::fabs(p0) + std::fabs(q0);

    // Pure first-order-in-q model with a mixed term is a varying-coefficient
    // linear ODE, outside the elementary catalogue.
    if (pf.n == 1 && std::fabs(a11) > tol * scale)
        throw SolveError(SolveFault::UnsupportedForm,
                         "mixed (x)(y') term with no quadratic slot is not elementary");
    if (pf.n <= 1 && std::fabs(a01) > tol * scale) {
        // y = a00 + a10 (x-x0) + a01 (y'-q0)  resolves to a linear normal form.
        NormalForm nf;
        nf.x0 = x0;
        nf.p0 = p0;
        nf.q0 = q0;
        nf.indep = pf.indep;
        nf.alpha = {q0, -a10 / a01};
        nf.beta = 1.0 / a01;
        PsiBranch b;
        b.sol = solve_normal_form(nf);
        b.label = "exponential";
        b.meets_base_conditions = true;
        std::vector<PsiBranch> out{std::move(b)};
        return out;
    }

    std::vector<PsiBranch> out;
    auto push = [&](double A, double B, double C) {
        for (const PsiBranch& b : out) {
            if (detail::nearly(b.sol.a0(), A, 1e-9) && detail::nearly(b.sol.b0(), B, 1e-9) &&
                detail::nearly(b.sol.poly.size() > 2 ? b.sol.poly[2] : 0.0, C, 1e-9))
                return;  // duplicate
        }
        PsiBranch b;
        b.sol.indep = pf.indep;
        b.sol.x0 = x0;
        b.sol.p0 = p0;
        b.sol.q0 = q0;
        b.sol.poly = {A, B, C};
        detail::trim_poly(b.sol.poly);
        b.constant_branch = b.sol.poly.size() <= 1;
        b.label = b.constant_branch ? "constant" : (b.sol.poly.size() == 2 ? "line" : "parabola");
        b.meets_base_conditions = detail::nearly(b.sol.value(x0), p0, 1e-10) &&
                                  detail::nearly(b.sol.derivative(x0), q0, 1e-10);
        b.remainder_cubic = std::fabs(4.0 * a12 * C * C);
        b.exact = b.remainder_cubic <= tol * scale;
        out.push_back(std::move(b));
    };

    auto A_of = [&](double u, double C) {
        (void)C;
        return a00 - a10 * x0 + (a01 - a11 * x0) * u + (a02 - a12 * x0) * u * u;
    };
    // x^1 identity residual, zero when (u, C) is consistent.
    auto E1 = [&](double u, double C) {
        return a10 + 2.0 * a01 * C + 4.0 * a02 * u * C + a11 * (u - 2.0 * C * x0) +
               a12 * u * (u - 4.0 * C * x0) - (q0 + u);
    };
    auto push_uc = [&](double u, double C) { push(A_of(u, C), q0 + u, C); };

    // Family I: lines.  E1(u, 0) = 0 is a quadratic in u.
    {
        double c2 = a12, c1 = a11 - 1.0, c0c = a10 - q0;
        double sc = std::max({std::fabs(c2), std::fabs(c1), std::fabs(c0c)});
        if (sc == 0.0) {
            // Any slope works; pin it.
            if (pin == PsiPin::Slope) push_uc(0.0, 0.0);
            else
                for (double u : detail::real_quadratic_roots(
                         a02 - a12 * x0, a01 - a11 * x0 + x0, -a10 * x0 + q0 * x0, tol))
                    push_uc(u, 0.0);
        } else {
            for (double u : detail::real_quadratic_roots(c2, c1, c0c, tol)) push_uc(u, 0.0);
        }
    }

    // Family II: genuine parabolas, where the bracket in the x^2 identity vanishes:
    //   1 - 2 a11 = 4 (a02 - a12 x0) C + 4 a12 u.
    if (pf.n == 2) {
        if (std::fabs(a12) > tol * scale) {
            // u is affine in C; E1 becomes a quadratic in C.
            double r = (1.0 - 2.0 * a11) / (4.0 * a12);
            double s = -(a02 - a12 * x0) / a12;
            auto g = [&](double C) { return E1(r + s * C, C); };
            double g0 = g(0.0), gp = g(1.0), gm = g(-1.0);
            double c2 = 0.5 * (gp + gm) - g0, c1 = 0.5 * (gp - gm), c0c = g0;
            for (double C : detail::real_quadratic_roots(c2, c1, c0c, tol))
                if (std::fabs(C) > tol) push_uc(r + s * C, C);
        } else if (std::fabs(a02) > tol * scale) {
            double Cstar = (1.0 - 2.0 * a11) / (4.0 * a02);
            if (std::fabs(Cstar) > tol) {
                // E1 collapses to a11 u = 2 a01 C* + a10 - 2 a11 C* x0 - q0.
                double rhs = 2.0 * a01 * Cstar + a10 - 2.0 * a11 * Cstar * x0 - q0;
                if (std::fabs(a11) > tol * scale) {
                    push_uc(rhs / a11, Cstar);
                } else if (std::fabs(rhs) <= tol * scale) {
                    // u is free; eliminate it with the pinned base condition.
                    if (pin == PsiPin::Slope) {
                        push_uc(-2.0 * Cstar * x0, Cstar);
                    } else {
                        for (double u : detail::real_quadratic_roots(
                                 a02 - a12 * x0, a01 - a11 * x0 + x0,
                                 -a10 * x0 + q0 * x0 + Cstar * x0 * x0, tol))
                            push_uc(u, Cstar);
                    }
                }
                // else: inconsistent, no parabola in this family
            }
        }
        // a02 = a12 = 0: the x^2 identity needs 2 a11 = 1 for any parabola, a
        // non-generic continuum we do not enumerate; lines already cover it.
    }

    if (out.empty())
        throw SolveError(SolveFault::NoRealBranch,
                         "no real constant, line or parabola satisfies the local model");

    std::stable_sort(out.begin(), out.end(), [](const PsiBranch& a, const PsiBranch& b) {
        auto rank = [](const PsiBranch& x) {
            if (x.meets_base_conditions && !x.constant_branch) return 0;
            if (x.meets_base_conditions) return 1;
            return 2;
        };
        return rank(a) < rank(b);
    });
    return out;
}

/// First root of y(t) = 0 past the anchor, for solutions starting positive there.
inline double collapse_time(const ClosedFormSolution& sol) {
    double y0 = sol.value(sol.x0);
    if (!(y0 > 0))
        throw SolveError(SolveFault::BadPrecondition,
                         "collapse time needs a positive value at the anchor point");

    if (sol.c0 == 0.0 && sol.poly.size() <= 3) {
        // Quadratic formula, smallest root greater than the anchor.
        double a = sol.poly.size() > 2 ? sol.poly[2] : 0.0;
        double b = sol.poly.size() > 1 ? sol.poly[1] : 0.0;
        double c = sol.poly.empty() ? 0.0 : sol.poly[0];
        std::vector<double> roots = detail::real_quadratic_roots(a, b, c, 1e-14);
        double best = HUGE_VAL;
        for (double r : roots)
            if (r > sol.x0 && r < best) best = r;
        if (best != HUGE_VAL) return best;
        throw SolveError(SolveFault::NoZeroCrossing,
                         "the solution never returns to zero after the anchor");
    }

    // Bracket by doubling, then bisect.
    double span = 1.0 + std::fabs(sol.x0);
    for (int grow = 0; grow < 42; ++grow, span *= 2.0) {
        constexpr int kCells = 512;
        double prev = y0;
        for (int i = 1; i <= kCells; ++i) {
            double t = sol.x0 + span * i / kCells;
            double yt = sol.value(t);
            if (!std::isfinite(yt)) break;
            if ((prev > 0) && (yt <= 0)) {
                double lo = sol.x0 + span * (i - 1) / kCells, hi = t;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if (mid == lo || mid == hi) break;
                    (sol.value(mid) > 0 ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
            prev = yt;
        }
    }
    throw SolveError(SolveFault::NoZeroCrossing,
                     "the solution never returns to zero after the anchor");
}

}  // namespace dini
