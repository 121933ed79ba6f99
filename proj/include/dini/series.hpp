#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "dini/closed_form.hpp"
#include "dini/error.hpp"
#include "dini/expr.hpp"
#include "dini/implicit_jet.hpp"
#include "dini/local_ode.hpp"

namespace dini {

namespace detail {

inline std::string deriv_symbol(int k) { return "y" + std::to_string(k); }

inline std::string fmt_short(double v) {
    if (v == 0.0) v = 0.0;  // fold away negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

/// The equation F(x, y, y') = 0 expanded in powers of (x - x0) with the unknown
/// derivative values y_k = y^(k)(x0) kept symbolic:  eq[k] is the coefficient of
/// (x - x0)^k after substituting the truncated series for y and y'.
struct ResidualExpansion {
    double x0 = 0.0;
    int order = 0;           // highest retained power
    std::string indep = "x";
    std::vector<std::string> unknowns;  // "y0" .. "y{order+1}"
    std::vector<Expr> eq;               // eq[k], k = 0..order
};

inline ResidualExpansion expand_residual(const Expr& F, double x0, int order) {
    if (order < 0 || order > 4)
        throw SolveError(SolveFault::OrderTooHigh, "series order is limited to 4");

    ResidualExpansion out;
    out.x0 = x0;
    out.order = order;
    out.indep = infer_independent(F);

    const int K = order + 1;
    for (int k = 0; k <= K; ++k) out.unknowns.push_back(detail::deriv_symbol(k));

    // x -> x0 + s,  y -> sum y_k s^k / k!,  y' -> sum y_k s^{k-1} / (k-1)!
    // with a fresh shift symbol s that the input grammar cannot collide with.
    const std::string s = "dx";
    Expr y_series, q_series;
    double kfact = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) kfact *= k;
        Expr yk = var(detail::deriv_symbol(k));
        Expr term = yk;
        if (k == 1) term = term * var(s);
        else if (k > 1)
            term = num(Rational::from_double(1.0 / kfact)) * yk * pow(var(s), Rational(k));
        y_series = k == 0 ? term : y_series + term;
        if (k >= 1) {
            Expr dterm = yk;
            if (k == 2) dterm = dterm * var(s);
            else if (k > 2)
                dterm = num(Rational::from_double(k / kfact)) * yk *
                        pow(var(s), Rational(k - 1));
            q_series = k == 1 ? dterm : q_series + dterm;
        }
    }

    Expr R = substitute(F, out.indep, num(Rational::from_double(x0)) + var(s));
    R = substitute(R, "p", y_series);
    R = substitute(R, "q", q_series);
    R = simplify(R);

    long long kf = 1;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) {
            R = differentiate(R, s);
            kf *= k;
        }
        Expr at0 = simplify(substitute(R, s, num(0)));
        out.eq.push_back(simplify(num(1, kf) * at0));
    }
    return out;
}

/// One consistent assignment of leading derivative values at x0.
struct DerivativeBranch {
    std::map<int, double> deriv;          // k -> y^(k)(x0)
    std::vector<std::string> provenance;  // how each equation was settled

    /// Taylor coefficient a_k = y^(k)/k! while the prefix 0..k is known.
    std::vector<double> coefficients() const {
        std::vector<double> a;
        double kfact = 1.0;
        for (int k = 0;; ++k) {
            auto it = deriv.find(k);
            if (it == deriv.end()) break;
            if (k > 0) kfact *= k;
            a.push_back(it->second / kfact);
        }
        return a;
    }
};

/// Solves eq[0], eq[1], ... in turn.  After substituting everything already
/// known, each equation must either be an identity or determine exactly one new
/// derivative value; genuine quadratic dependence forks the branch on its real
/// roots (larger root first).  Coefficients are read off numerically, so known
/// values are expected to be clean (an exactly-zero value kills its term).
inline std::vector<DerivativeBranch> solve_branches(const ResidualExpansion& ex,
                                                    const std::map<int, double>& initial,
                                                    double tol = 1e-9) {
    DerivativeBranch seed;
    seed.deriv = initial;
    std::vector<DerivativeBranch> live{seed};

    for (int k = 0; k < static_cast<int>(ex.eq.size()); ++k) {
        std::vector<DerivativeBranch> next;
        for (DerivativeBranch& br : live) {
            double known_scale = 1.0;
            Expr cur = ex.eq[k];
            for (const auto& [j, v] : br.deriv) {
                cur = substitute(cur, detail::deriv_symbol(j), num(Rational::from_double(v)));
                known_scale += std::fabs(v);
            }
            cur = simplify(cur);

            std::vector<int> fresh;
            for (const std::string& v : variables(cur))
                if (v.size() > 1 && v[0] == 'y') fresh.push_back(std::stoi(v.substr(1)));

            if (fresh.empty()) {
                double residue = evaluate(cur, {});
                if (std::fabs(residue) <= tol * known_scale) {
                    br.provenance.push_back("E" + std::to_string(k) + ": identity");
                    next.push_back(std::move(br));
                }
                // else inconsistent: branch dies
                continue;
            }
            if (fresh.size() > 1)
                throw SolveError(SolveFault::UnderDetermined,
                                 "equation " + std::to_string(k) +
                                     " brings in more than one new derivative value");

            const int j = fresh[0];
            const std::string sym = detail::deriv_symbol(j);
            auto g = [&](double v) {
                Bindings at;
                at.set(sym, v);
                return evaluate(cur, at);
            };
            double g0 = g(0.0), gp = g(1.0), gm = g(-1.0);
            double c2 = 0.5 * (gp + gm) - g0;
            double c1 = 0.5 * (gp - gm);
            double sc = std::max({std::fabs(c2), std::fabs(c1), std::fabs(g0), known_scale});
            if (std::fabs(g(2.0) - (4.0 * c2 + 2.0 * c1 + g0)) > tol * sc * 8.0)
                throw SolveError(SolveFault::NotQuadratic,
                                 "equation " + std::to_string(k) +
                                     " is not polynomial of degree <= 2 in its unknown");

            if (std::fabs(c2) <= tol * sc) {
                if (std::fabs(c1) <= tol * sc)
                    throw SolveError(SolveFault::UnderDetermined,
                                     "equation " + std::to_string(k) +
                                         " does not pin down its unknown");
                double v = -g0 / c1;
                br.deriv[j] = v;
                br.provenance.push_back("E" + std::to_string(k) + ": y" + std::to_string(j) +
                                        " = " + detail::fmt_short(v));
                next.push_back(std::move(br));
                continue;
            }

            std::vector<double> roots = detail::real_quadratic_roots(c2, c1, g0, tol);
            if (roots.size() > 1) std::swap(roots[0], roots[1]);  // larger root first
            for (std::size_t r = 0; r < roots.size(); ++r) {
                DerivativeBranch forked = br;
                forked.deriv[j] = roots[r];
                std::string note = "E" + std::to_string(k) + ": y" + std::to_string(j) + " = " +
                                   detail::fmt_short(roots[r]);
                if (roots.size() == 1) note += " (double root)";
                else note += " (root " + std::to_string(r + 1) + " of 2)";
                forked.provenance.push_back(std::move(note));
                next.push_back(std::move(forked));
            }
            // no real roots: branch dies
        }
        live = std::move(next);
        if (live.empty())
            throw SolveError(SolveFault::NoRealBranch,
                             "every derivative branch became inconsistent at equation " +
                                 std::to_string(k));
    }
    return live;
}

/// A series branch set against the closed-form local solution of the same anchor.
struct BranchComparison {
    DerivativeBranch branch;
    std::vector<double> series_coeff;    // (x - x0)-power coefficients from the branch
    std::vector<double> implicit_coeff;  // same powers from the closed-form solution
    double max_delta = 0.0;
    bool matched = false;
    std::string implicit_kind;  // "normal" or "quadratic-ansatz"
};

struct SeriesComparison {
    double x0 = 0.0;
    std::string indep = "x";
    std::vector<BranchComparison> rows;  // most consistent first
};

/// Runs both machineries from the same anchor and pairs them up coefficient by
/// coefficient.  Each branch supplies its own slope y'(x0), so each distinct
/// slope gets its own closed-form solution: resolved for q when possible,
/// otherwise (tangential contact) resolved for p with the quadratic ansatz.
inline SeriesComparison compare_with_implicit(const Expr& F, const ResidualExpansion& ex,
                                              const std::vector<DerivativeBranch>& branches,
                                              double tol = 1e-9) {
    SeriesComparison out;
    out.x0 = ex.x0;
    out.indep = ex.indep;

    for (const DerivativeBranch& br : branches) {
        BranchComparison row;
        row.branch = br;
        row.series_coeff = br.coefficients();
        if (row.series_coeff.size() < 2) {
            out.rows.push_back(std::move(row));
            continue;
        }
        double p0 = row.series_coeff[0];
        double q0 = br.deriv.at(1);

        ClosedFormSolution sol;
        try {
            BasePoint base = check_base_point(F, ex.x0, p0, q0, SolveFor::Q);
            int order_x = std::min(ex.order, 3);
            sol = solve_normal_form(build_normal_form(F, base, std::max(order_x, 1)));
            row.implicit_kind = "normal";
        } catch (const DegenerateDerivative&) {
            BasePoint base = check_base_point(F, ex.x0, p0, q0, SolveFor::P);
            PsiForm pf = build_psi_form(F, base, 1, 2);
            std::vector<PsiBranch> psi = solve_psi_form(pf, PsiPin::Value);
            sol = psi.front().sol;
            row.implicit_kind = "quadratic-ansatz";
        }

        double kfact = 1.0;
        for (std::size_t k = 0; k < row.series_coeff.size(); ++k) {
            if (k > 0) kfact *= k;
            row.implicit_coeff.push_back(sol.nth_derivative(static_cast<int>(k), ex.x0) / kfact);
        }
        double scale = 1.0;
        for (double c : row.series_coeff) scale += std::fabs(c);
        for (std::size_t k = 0; k < row.series_coeff.size(); ++k)
            row.max_delta = std::max(row.max_delta,
                                     std::fabs(row.series_coeff[k] - row.implicit_coeff[k]));
        row.matched = row.max_delta <= tol * scale;
        out.rows.push_back(std::move(row));
    }

    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [](const BranchComparison& a, const BranchComparison& b) {
                         return a.max_delta < b.max_delta;
                     });
    return out;
}

}  // namespace dini
