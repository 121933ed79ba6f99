#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dini/base_point.hpp"
#include "dini/error.hpp"
#include "dini/expr.hpp"

namespace dini {

/// Mixed partial derivatives of the locally resolved branch.
///
/// Mode Q: near the base point the equation F(x, p, q) = 0 defines q = g(x, p);
/// D(i, j) = d^{i+j} g / dx^i dp^j evaluated at (x0, p0).  Mode P is the same
/// with the roles of p and q exchanged (p = g(x, q), derivatives in x and q).
struct ImplicitJet {
    BasePoint base;
    int m = 0;  // highest derivative order along the independent variable
    int n = 0;  // highest derivative order along the free slot
    std::vector<double> d;  // (m+1) x (n+1), row-major in i

    double D(int i, int j) const { return d[static_cast<std::size_t>(i) * (n + 1) + j]; }
    double& D(int i, int j) { return d[static_cast<std::size_t>(i) * (n + 1) + j]; }
};

namespace detail {

inline std::string jet_symbol(int i, int j) {
    return "u" + std::to_string(i) + "_" + std::to_string(j);
}

// d/dw of E where the solved slot's derivatives appear as symbols u{a}_{b}:
// chain rule adds u{a+1}_{b} (w along the independent axis) or u{a}_{b+1}.
inline Expr total_derivative(const Expr& E, const std::string& w, bool along_indep,
                             int imax, int jmax) {
    Expr out = differentiate_raw(E, w);
    for (int a = 0; a <= imax; ++a)
        for (int b = 0; b <= jmax; ++b) {
            Expr dEdu = differentiate_raw(E, jet_symbol(a, b));
            if (dEdu.is_number(0)) continue;
            Expr bump = var(along_indep ? jet_symbol(a + 1, b) : jet_symbol(a, b + 1));
            out = out + dEdu * bump;
        }
    return simplify(out);
}

}  // namespace detail

/// Computes the full rectangle D(0..m, 0..n) by repeated total differentiation
/// of F with the solved slot replaced by an unknown-function symbol.  Each new
/// equation is linear in its highest symbol, so the rectangle resolves in one
/// ascending sweep.  Orders with m + n > 4 are rejected.
inline ImplicitJet implicit_jet(const Expr& F, const BasePoint& base, int m, int n) {
    if (m < 0 || n < 0 || m + n > 4)
        throw SolveError(SolveFault::OrderTooHigh,
                         "derivative rectangle is limited to total order 4");

    const std::string solved = base.mode == SolveFor::Q ? "q" : "p";
    const std::string free_slot = base.mode == SolveFor::Q ? "p" : "q";
    const double free0 = base.mode == SolveFor::Q ? base.p0 : base.q0;
    const double solved0 = base.mode == SolveFor::Q ? base.q0 : base.p0;

    ImplicitJet jet;
    jet.base = base;
    jet.m = m;
    jet.n = n;
    jet.d.assign(static_cast<std::size_t>(m + 1) * (n + 1), 0.0);
    jet.D(0, 0) = solved0;

    // E[i][j] = 0 is the (i, j) total derivative of F(x, free, g(x, free)) = 0.
    std::vector<std::vector<Expr>> E(m + 1, std::vector<Expr>(n + 1));
    E[0][0] = simplify(substitute(F, solved, var(detail::jet_symbol(0, 0))));
    for (int i = 0; i <= m; ++i) {
        if (i > 0)
            E[i][0] = detail::total_derivative(E[i - 1][0], base.indep, true, i - 1, 0);
        for (int j = 1; j <= n; ++j)
            E[i][j] = detail::total_derivative(E[i][j - 1], free_slot, false, i, j - 1);
    }

    double scale = 1.0 + std::fabs(base.x0) + std::fabs(base.p0) + std::fabs(base.q0);
    Tolerances tol;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j) {
            if (i == 0 && j == 0) continue;
            Bindings at;
            at.set(base.indep, base.x0).set(free_slot, free0);
            for (int a = 0; a <= i; ++a)
                for (int b = 0; b <= n; ++b)
                    at.set(detail::jet_symbol(a, b), a == i && b >= j ? 0.0 : jet.D(a, b));
            double value = evaluate(E[i][j], at);
            double slope = evaluate(differentiate(E[i][j], detail::jet_symbol(i, j)), at);
            if (!(std::fabs(slope) > tol.degenerate * scale))
                throw DegenerateDerivative("dF/d" + solved, slope, tol.degenerate * scale);
            jet.D(i, j) = -value / slope;
        }
    return jet;
}

struct JetCheckRow {
    std::string label;        // which derivative, e.g. "D(2,0)"
    double closed_form = 0.0; // direct partial-derivative formula
    double recursion = 0.0;   // value from the sweep
    double abs_delta = 0.0;
    double rel_delta = 0.0;
};

/// Cross-checks low-order jet entries against explicit resolvent formulas
/// (first order, the pure second derivative, and the pure third derivative
/// along the independent axis in mode Q).
inline std::vector<JetCheckRow> jet_closed_form_check(const Expr& F, const ImplicitJet& jet) {
    const BasePoint& base = jet.base;
    const std::string solved = base.mode == SolveFor::Q ? "q" : "p";
    const std::string free_slot = base.mode == SolveFor::Q ? "p" : "q";

    Bindings at;
    at.set(base.indep, base.x0).set("p", base.p0).set("q", base.q0);
    auto ev = [&](const Expr& e) { return evaluate(e, at); };

    Expr Fs = differentiate(F, solved);
    double fs = ev(Fs);

    std::vector<JetCheckRow> rows;
    auto push = [&](const std::string& label, double closed, double rec) {
        double ad = std::fabs(closed - rec);
        rows.push_back({label, closed, rec, ad, ad / std::max(std::fabs(closed), 1e-300)});
    };

    if (jet.m >= 1)
        push("D(1,0)", -ev(differentiate(F, base.indep)) / fs, jet.D(1, 0));
    if (jet.n >= 1)
        push("D(0,1)", -ev(differentiate(F, free_slot)) / fs, jet.D(0, 1));
    if (jet.m >= 2) {
        Expr Fx = differentiate(F, base.indep);
        double d10 = jet.D(1, 0);
        double fxx = ev(differentiate(Fx, base.indep));
        double fxs = ev(differentiate(Fx, solved));
        double fss = ev(differentiate(Fs, solved));
        push("D(2,0)", -(fxx + 2.0 * fxs * d10 + fss * d10 * d10) / fs, jet.D(2, 0));
        if (jet.m >= 3) {
            Expr Fxx = differentiate(Fx, base.indep);
            Expr Fxs = differentiate(Fx, solved);
            Expr Fss = differentiate(Fs, solved);
            double d20 = jet.D(2, 0);
            double fxxx = ev(differentiate(Fxx, base.indep));
            double fxxs = ev(differentiate(Fxx, solved));
            double fxss = ev(differentiate(Fxs, solved));
            double fsss = ev(differentiate(Fss, solved));
            double third = fxxx + 3.0 * fxxs * d10 + 3.0 * fxss * d10 * d10 +
                           fsss * d10 * d10 * d10 + 3.0 * d20 * (fxs + fss * d10);
            push("D(3,0)", -third / fs, jet.D(3, 0));
        }
    }
    if (jet.n >= 2) {
        Expr Ff = differentiate(F, free_slot);
        double d01 = jet.D(0, 1);
        double fff = ev(differentiate(Ff, free_slot));
        double ffs = ev(differentiate(Ff, solved));
        double fss = ev(differentiate(Fs, solved));
        push("D(0,2)", -(fff + 2.0 * ffs * d01 + fss * d01 * d01) / fs, jet.D(0, 2));
    }
    return rows;
}

}  // namespace dini
