#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "dini/error.hpp"
#include "dini/expr.hpp"

namespace dini {

/// Which first-derivative slot the equation is resolved for near the base point.
enum class SolveFor { Q, P };

struct Tolerances {
    double residual = 1e-9;    // |F| at the base point, relative to coordinate scale
    double degenerate = 1e-8;  // partial-derivative magnitude below which we refuse
};

struct BasePoint {
    double x0 = 0.0;
    double p0 = 0.0;  // value of the unknown function at x0
    double q0 = 0.0;  // value of its derivative at x0
    SolveFor mode = SolveFor::Q;
    std::string indep = "x";
    double residual = 0.0;        // |F(x0, p0, q0)|
    double solved_partial = 0.0;  // dF/dq (mode Q) or dF/dp (mode P) there
};

/// Picks the independent-variable name the equation uses ("x" by default,
/// "t" when the equation is written in t). Rejects any other symbol.
inline std::string infer_independent(const Expr& F) {
    bool has_x = false, has_t = false;
    for (const std::string& v : variables(F)) {
        if (v == "x") has_x = true;
        else if (v == "t") has_t = true;
        else if (v != "p" && v != "q")
            throw UnknownVariable("equation uses unsupported symbol '" + v + "'");
    }
    if (has_x && has_t)
        throw UnknownVariable("equation mixes both independent variable names x and t");
    return has_t ? "t" : "x";
}

/// Validates that (x0, p0, q0) lies on F = 0 and that the chosen first-order
/// slot can be resolved there (non-vanishing partial derivative).
inline BasePoint check_base_point(const Expr& F, double x0, double p0, double q0,
                                  SolveFor mode, const Tolerances& tol = {}) {
    BasePoint bp;
    bp.x0 = x0;
    bp.p0 = p0;
    bp.q0 = q0;
    bp.mode = mode;
    bp.indep = infer_independent(F);

    Bindings at;
    at.set(bp.indep, x0).set("p", p0).set("q", q0);
    double scale = 1.0 + std::fabs(x0) + std::fabs(p0) + std::fabs(q0);

    bp.residual = std::fabs(evaluate(F, at));
    if (!(bp.residual <= tol.residual * scale))
        throw ResidualTooLarge(bp.residual, tol.residual * scale);

    const char* slot = mode == SolveFor::Q ? "q" : "p";
    bp.solved_partial = evaluate(differentiate(F, slot), at);
    if (!(std::fabs(bp.solved_partial) > tol.degenerate * scale))
        throw DegenerateDerivative(std::string("dF/d") + slot, bp.solved_partial,
                                   tol.degenerate * scale);
    return bp;
}

namespace detail {

inline double bisect(const auto& g, double lo, double hi, double glo) {
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Ternary search for the minimum of |g| on [lo, hi]; used when the scan sees
// a dip without a sign change (tangential roots).
inline double minimize_abs(const auto& g, double lo, double hi) {
    for (int it = 0; it < 240; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (std::fabs(g(m1)) <= std::fabs(g(m2))) hi = m2;
        else lo = m1;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Completes a base point when exactly one coordinate of (x0, p0, q0) is left
/// unspecified: finds a root of F along that coordinate inside [lo, hi].
/// Sign-change roots are bisected; if no sign change exists, the scan falls
/// back to the deepest |F| dip and accepts it only when F is tolerably zero.
inline double solve_missing_coordinate(const Expr& F, std::optional<double> x0,
                                       std::optional<double> p0, std::optional<double> q0,
                                       double lo, double hi, const Tolerances& tol = {}) {
    int missing = int(!x0) + int(!p0) + int(!q0);
    if (missing != 1)
        throw SolveError(SolveFault::BadPrecondition,
                         "exactly one coordinate must be left free to solve for");
    if (!(lo < hi))
        throw SolveError(SolveFault::BadPrecondition, "search bracket is empty");

    std::string indep = infer_independent(F);
    const std::string unknown = !x0 ? indep : (!p0 ? "p" : "q");

    auto g = [&](double v) {
        Bindings at;
        at.set(indep, x0.value_or(v)).set("p", p0.value_or(v)).set("q", q0.value_or(v));
        return evaluate(F, at);
    };

    constexpr int kCells = 2048;
    double h = (hi - lo) / kCells;
    double prev = 0.0;
    bool have_prev = false;
    double best_v = lo, best_abs = HUGE_VAL;
    int best_cell = -1;
    for (int i = 0; i <= kCells; ++i) {
        double v = lo + i * h;
        double gv;
        try {
            gv = g(v);
        } catch (const EvalError&) {
            have_prev = false;
            continue;
        }
        if (!std::isfinite(gv)) {
            have_prev = false;
            continue;
        }
        if (std::fabs(gv) < best_abs) {
            best_abs = std::fabs(gv);
            best_v = v;
            best_cell = i;
        }
        if (have_prev && ((prev < 0) != (gv < 0)))
            return detail::bisect(g, v - h, v, prev);
        prev = gv;
        have_prev = true;
    }

    if (best_cell >= 0) {
        double wlo = lo + std::max(0, best_cell - 1) * h;
        double whi = lo + std::min(kCells, best_cell + 1) * h;
        double v = detail::minimize_abs(g, wlo, whi);
        double scale = 1.0 + std::fabs(x0.value_or(v)) + std::fabs(p0.value_or(v)) +
                       std::fabs(q0.value_or(v));
        if (std::fabs(g(v)) <= tol.residual * scale) return v;
        if (best_abs <= tol.residual * scale) return best_v;
    }
    throw SolveError(SolveFault::NoRoot,
                     "no root for '" + unknown + "' inside the search bracket");
}

}  // namespace dini
