#pragma once

#include <string>
#include <vector>

#include "dini/error.hpp"
#include "dini/expr.hpp"
#include "dini/implicit_jet.hpp"

namespace dini {

namespace detail {

inline Expr shifted_var(const std::string& name, double center) {
    if (center == 0.0) return var(name);
    return var(name) - num(Rational::from_double(center));
}

inline Expr monomial_sum_term(Expr acc, bool& first, double coeff, const Expr& base, int k) {
    if (coeff == 0.0) return acc;
    Expr term = num(Rational::from_double(coeff));
    if (k == 1) term = term * base;
    else if (k > 1) term = term * pow(base, Rational(k));
    Expr out = first ? term : acc + term;
    first = false;
    return out;
}

}  // namespace detail

/// Resolved-for-q local model:  y' = alpha_0 + sum_k alpha_k (x - x0)^k + beta (y - p0),
/// the tangent-plane (and optionally higher pure-x) truncation of the resolvent g
/// with  q = g(x, p).
struct NormalForm {
    double x0 = 0.0, p0 = 0.0, q0 = 0.0;
    std::string indep = "x";
    std::vector<double> alpha;  // alpha[k] multiplies (x - x0)^k; alpha[0] = q0
    double beta = 0.0;          // multiplies (y - p0)
    Expr rhs;                   // same content as an expression in {indep, p}
};

/// order_x = highest retained pure derivative along the independent variable
/// (1 gives the tangent plane; 3 is the ceiling since the rectangle is (order_x, 1)).
inline NormalForm build_normal_form(const Expr& F, const BasePoint& base, int order_x = 1) {
    if (base.mode != SolveFor::Q)
        throw SolveError(SolveFault::WrongMode,
                         "normal form needs a base point resolved for q");
    ImplicitJet jet = implicit_jet(F, base, order_x, 1);

    NormalForm nf;
    nf.x0 = base.x0;
    nf.p0 = base.p0;
    nf.q0 = base.q0;
    nf.indep = base.indep;
    nf.alpha.assign(order_x + 1, 0.0);
    double kfact = 1.0;
    for (int k = 0; k <= order_x; ++k) {
        if (k > 0) kfact *= k;
        nf.alpha[k] = jet.D(k, 0) / kfact;
    }
    nf.beta = jet.D(0, 1);

    Expr dx = detail::shifted_var(nf.indep, nf.x0);
    Expr acc;
    bool first = true;
    for (int k = 0; k <= order_x; ++k)
        acc = detail::monomial_sum_term(acc, first, nf.alpha[k], dx, k);
    if (nf.beta != 0.0) {
        Expr dev = detail::shifted_var("p", nf.p0);
        acc = detail::monomial_sum_term(acc, first, nf.beta, dev, 1);
    }
    nf.rhs = simplify(first ? num(0) : acc);
    return nf;
}

/// Resolved-for-p local model:  y = sum_ij a[i][j] (x - x0)^i (y' - q0)^j,
/// the rectangular truncation of the resolvent g with  p = g(x, q).
struct PsiForm {
    double x0 = 0.0, p0 = 0.0, q0 = 0.0;
    std::string indep = "x";
    int m = 0, n = 0;
    std::vector<double> a;  // (m+1) x (n+1) row-major
    Expr rhs;               // same content as an expression in {indep, q}

    double at(int i, int j) const {
        if (i < 0 || j < 0 || i > m || j > n) return 0.0;
        return a[static_cast<std::size_t>(i) * (n + 1) + j];
    }
};

inline PsiForm build_psi_form(const Expr& F, const BasePoint& base, int m = 1, int n = 2) {
    if (base.mode != SolveFor::P)
        throw SolveError(SolveFault::WrongMode,
                         "this local model needs a base point resolved for p");
    ImplicitJet jet = implicit_jet(F, base, m, n);

    PsiForm pf;
    pf.x0 = base.x0;
    pf.p0 = base.p0;
    pf.q0 = base.q0;
    pf.indep = base.indep;
    pf.m = m;
    pf.n = n;
    pf.a.assign(static_cast<std::size_t>(m + 1) * (n + 1), 0.0);

    double ifact = 1.0;
    for (int i = 0; i <= m; ++i) {
        if (i > 0) ifact *= i;
        double jfact = 1.0;
        for (int j = 0; j <= n; ++j) {
            if (j > 0) jfact *= j;
            pf.a[static_cast<std::size_t>(i) * (n + 1) + j] = jet.D(i, j) / (ifact * jfact);
        }
    }

    Expr dx = detail::shifted_var(pf.indep, pf.x0);
    Expr dq = detail::shifted_var("q", pf.q0);
    Expr acc;
    bool first = true;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j) {
            double c = pf.at(i, j);
            if (c == 0.0) continue;
            Expr term = num(Rational::from_double(c));
            if (i == 1) term = term * dx;
            else if (i > 1) term = term * pow(dx, Rational(i));
            if (j == 1) term = term * dq;
            else if (j > 1) term = term * pow(dq, Rational(j));
            acc = first ? term : acc + term;
            first = false;
        }
    pf.rhs = simplify(first ? num(0) : acc);
    return pf;
}

}  // namespace dini
