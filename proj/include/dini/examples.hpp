#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "dini/base_point.hpp"
#include "dini/closed_form.hpp"
#include "dini/implicit_jet.hpp"
#include "dini/local_ode.hpp"
#include "dini/numeric.hpp"
#include "dini/parser.hpp"
#include "dini/report.hpp"

namespace dini {

/// Built-in demonstration problems.  Ids: 1, 1bis, 2, 2bis, 2ter, 3, 4.
/// The physical parameters only matter for the cavity-collapse problem (4).
struct ExampleConfig {
    std::string id = "1";
    double R0 = 0.1;
    double p_f = 1.0;
    double rho = 1.0;
    bool paper_variant = false;  // show the classically quoted third derivative
    std::string csv_path;        // empty: no CSV emission
    Tolerances tol;
};

namespace detail {

inline void describe_base(Report& rep, const Expr& F, const BasePoint& bp) {
    auto& eq = rep.add("equation");
    eq.put("F", to_text(F));
    eq.put("solved for", bp.mode == SolveFor::Q ? "q" : "p");
    eq.put("independent variable", bp.indep);
    auto& base = rep.add("base point");
    base.put("x0", bp.x0).put("p0", bp.p0).put("q0", bp.q0);
    base.put("residual |F|", bp.residual);
    base.put(std::string("partial in ") + (bp.mode == SolveFor::Q ? "q" : "p"), bp.solved_partial);
}

inline void describe_jet(Report& rep, const ImplicitJet& jet) {
    auto& s = rep.add("derivative table");
    for (int i = 0; i <= jet.m; ++i)
        for (int j = 0; j <= jet.n; ++j) {
            char key[32];
            std::snprintf(key, sizeof key, "D(%d,%d)", i, j);
            s.put(key, jet.D(i, j));
        }
}

inline void describe_psi(Report& rep, const PsiForm& pf) {
    auto& s = rep.add("local model");
    std::string lhs = "y = " + to_text(pf.rhs);
    s.put("relation", lhs);
    for (int i = 0; i <= pf.m; ++i)
        for (int j = 0; j <= pf.n; ++j) {
            char key[32];
            std::snprintf(key, sizeof key, "a(%d,%d)", i, j);
            s.put(key, pf.at(i, j));
        }
}

inline void describe_normal(Report& rep, const NormalForm& nf) {
    auto& s = rep.add("local model");
    s.put("relation", "y' = " + to_text(nf.rhs));
    for (std::size_t k = 0; k < nf.alpha.size(); ++k)
        s.put("alpha" + std::to_string(k), nf.alpha[k]);
    s.put("beta", nf.beta);
}

inline void describe_solution(Report& rep, const ClosedFormSolution& sol,
                              const std::string& title = "solution") {
    auto& s = rep.add(title);
    s.put("y(" + sol.indep + ")", to_text(sol.to_expr()));
    s.put("a0", sol.a0());
    s.put("b0", sol.b0());
    s.put("c0", sol.c0);
    if (sol.c0 != 0.0) s.put("d0", sol.d0);
    s.put("y at x0", sol.value(sol.x0));
    s.put("y' at x0", sol.derivative(sol.x0));
}

inline void describe_branches(Report& rep, const std::vector<PsiBranch>& branches) {
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const PsiBranch& b = branches[i];
        auto& s = rep.add("branch " + std::to_string(i + 1) + " (" + b.label + ")");
        s.put("y(" + b.sol.indep + ")", to_text(b.sol.to_expr()));
        for (std::size_t k = 0; k < b.sol.poly.size(); ++k)
            s.put("coeff " + b.sol.indep + "^" + std::to_string(k), b.sol.poly[k]);
        s.put("meets base conditions", b.meets_base_conditions ? "yes" : "no");
        if (!b.exact)
            s.note("unbalanced cubic remainder of size " + round_trip(b.remainder_cubic) +
                   " per unit (" + b.sol.indep + " - x0)^3");
    }
}

inline std::vector<std::array<double, 4>> sample_pair(const std::function<double(double)>& a,
                                                      const std::function<double(double)>& b,
                                                      double lo, double hi, int samples) {
    return compare_curves(a, b, lo, hi, samples).rows;
}

}  // namespace detail

inline Report run_example(const ExampleConfig& cfg) {
    using detail::describe_base;
    const double pi = std::numbers::pi;
    Report rep;
    rep.command = "example " + cfg.id;

    if (cfg.id == "1" || cfg.id == "1bis") {
        Expr F = parse("2*p - q");
        BasePoint bp = check_base_point(F, 0.0, 1.0, 2.0, SolveFor::Q, cfg.tol);
        describe_base(rep, F, bp);
        ImplicitJet jet = implicit_jet(F, bp, 1, 1);
        detail::describe_jet(rep, jet);
        NormalForm nf = build_normal_form(F, bp, 1);
        detail::describe_normal(rep, nf);
        ClosedFormSolution sol = solve_normal_form(nf);
        detail::describe_solution(rep, sol);
        ResidualProfile prof = residual_profile(F, sol, -1.0, 1.0, 201);
        auto& checks = rep.add("checks");
        checks.put("max residual on [-1,1]", prof.max_abs);
        checks.put("mean residual on [-1,1]", prof.mean_abs);
        if (cfg.id == "1bis")
            rep.sections[rep.sections.size() - 2].note(
                "first-order model solved in closed form; the local model is exact here");
        if (!cfg.csv_path.empty()) {
            auto rows = detail::sample_pair([&](double x) { return sol.value(x); },
                                            [](double x) { return std::exp(2.0 * x); }, -1.0, 1.0,
                                            201);
            write_csv(cfg.csv_path, {"x", "value_a", "value_b", "abs_error"}, rows);
        }
        return rep;
    }

    if (cfg.id == "2") {
        Expr F = parse("q^2 + p^2 - 1");
        BasePoint bp = check_base_point(F, pi / 2, 1.0, 0.0, SolveFor::P, cfg.tol);
        describe_base(rep, F, bp);
        ImplicitJet jet = implicit_jet(F, bp, 1, 2);
        detail::describe_jet(rep, jet);
        PsiForm pf = build_psi_form(F, bp, 1, 2);
        detail::describe_psi(rep, pf);
        ResidualProfile prof = residual_profile(F, parse("sin(x)"), 0.0, pi, 101);
        auto& checks = rep.add("checks");
        checks.put("max residual of sin(x) on [0,pi]", prof.max_abs);
        checks.note("sin(x) satisfies the equation exactly; the derivative table is the "
                    "data the curved local models are built from (see 2bis and 2ter)");
        if (!cfg.csv_path.empty()) {
            write_csv(cfg.csv_path, {"x", "value", "derivative", "residual"}, prof.rows);
        }
        return rep;
    }

    if (cfg.id == "2bis" || cfg.id == "2ter") {
        Expr F = parse("q^2 + p^2 - 1");
        BasePoint bp = check_base_point(F, pi / 2, 1.0, 0.0, SolveFor::P, cfg.tol);
        describe_base(rep, F, bp);
        int n = cfg.id == "2bis" ? 1 : 2;
        PsiForm pf = build_psi_form(F, bp, 1, n);
        detail::describe_psi(rep, pf);
        auto branches = solve_psi_form(pf);
        detail::describe_branches(rep, branches);
        const ClosedFormSolution& sol = branches.front().sol;
        if (cfg.id == "2bis") {
            auto& prop = rep.add("first-order coefficients");
            prop.put("a0", sol.a0());
            prop.put("b0", sol.b0());
            prop.put("c0", sol.c0);
            prop.note("the partial of F in q vanishes at the base point, so the "
                      "first-order solution is the line a0 + b0*x and no growth constant "
                      "d0 exists (the classical worked example lists a stray d0 = 2 anyway)");
        }
        double lo = pi / 2 - 0.5, hi = pi / 2 + 0.5;
        ResidualProfile prof = residual_profile(F, sol, lo, hi, 101);
        ValidationReport vs =
            compare_curves([&](double x) { return sol.value(x); },
                           [](double x) { return std::sin(x); }, lo, hi, 101);
        auto& checks = rep.add("checks");
        checks.put("max residual on [pi/2-0.5,pi/2+0.5]", prof.max_abs);
        checks.put("max |solution - sin(x)|", vs.max_abs_error);
        if (!cfg.csv_path.empty())
            write_csv(cfg.csv_path, {"x", "value_a", "value_b", "abs_error"}, vs.rows);
        return rep;
    }

    if (cfg.id == "3") {
        Expr F = parse("-3*sin(x)*p^(4/3) - q");
        double q0 = -1.5 * std::sqrt(3.0);
        BasePoint bp = check_base_point(F, pi / 3, 1.0, q0, SolveFor::Q, cfg.tol);
        describe_base(rep, F, bp);
        ImplicitJet jet = implicit_jet(F, bp, 3, 1);
        double quoted = 1.5 * std::sqrt(3.0);
        ImplicitJet shown = jet;
        if (cfg.paper_variant) shown.D(3, 0) = quoted;
        detail::describe_jet(rep, shown);
        auto& disc = rep.add("third-derivative discrepancy");
        disc.put("computed D(3,0)", jet.D(3, 0));
        disc.put("classically quoted D(3,0)", quoted);
        disc.note(cfg.paper_variant
                      ? "the table above shows the classically quoted value 3*sqrt(3)/2; the "
                        "value consistent with the equation is 3/2, and every derived "
                        "quantity below uses 3/2"
                      : "the classical worked example quotes 3*sqrt(3)/2 for the third "
                        "derivative; differentiating the resolved equation gives 3/2, which "
                        "the table shows (pass --paper-variant to display the quoted value)");
        disc.note("the third-order solution expansion below is unaffected: it never "
                  "consumes D(3,0)");

        NormalForm nf = build_normal_form(F, bp, 3);
        detail::describe_normal(rep, nf);
        ClosedFormSolution sol = solve_normal_form(nf);
        detail::describe_solution(rep, sol);

        // Both curves expanded in powers of (pi - 3x): coefficient k is the
        // k-th Taylor coefficient at pi/3 times (-1/3)^k.
        auto& exp_s = rep.add("expansion in powers of (pi - 3*x)");
        double kfact = 1.0, conv = 1.0;
        for (int k = 0; k <= 3; ++k) {
            if (k > 0) {
                kfact *= k;
                conv *= -1.0 / 3.0;
            }
            exp_s.put("approx coeff (pi-3x)^" + std::to_string(k),
                      sol.nth_derivative(k, pi / 3) / kfact * conv);
        }
        Expr exact = parse("27/(9/2 - 3*cos(x))^3");
        Expr dk = exact;
        Bindings at0{{"x", pi / 3}};
        kfact = 1.0;
        conv = 1.0;
        for (int k = 0; k <= 3; ++k) {
            if (k > 0) {
                kfact *= k;
                conv *= -1.0 / 3.0;
                dk = differentiate(dk, "x");
            }
            exp_s.put("exact coeff (pi-3x)^" + std::to_string(k),
                      evaluate(dk, at0) / kfact * conv);
        }
        exp_s.note("exact curve: y = " + to_text(exact));

        double lo = pi / 3 - 1.0, hi = pi / 3 + 1.0;
        ValidationReport vs = compare_curves([&](double x) { return sol.value(x); },
                                             [&](double x) {
                                                 Bindings env{{"x", x}};
                                                 return evaluate(exact, env);
                                             },
                                             lo, hi, 201);
        ResidualProfile prof = residual_profile(F, sol, lo, hi, 201);
        auto& checks = rep.add("checks");
        checks.put("max |approx - exact| on [pi/3-1,pi/3+1]", vs.max_abs_error);
        checks.put("max residual of approx", prof.max_abs);
        if (!cfg.csv_path.empty())
            write_csv(cfg.csv_path, {"x", "value_a", "value_b", "abs_error"}, vs.rows);
        return rep;
    }

    if (cfg.id == "4") {
        if (!(cfg.R0 > 0.0) || !(cfg.p_f > 0.0) || !(cfg.rho > 0.0))
            throw SolveError(SolveFault::BadPrecondition,
                             "cavity parameters R0, p_f, rho must be positive");
        double k = 2.0 / 3.0 * cfg.p_f / cfg.rho;
        std::string text = round_trip(k * cfg.R0 * cfg.R0 * cfg.R0) + " - (" + round_trip(k) +
                           " + q^2)*p^3";
        Expr F = parse(text);
        BasePoint bp = check_base_point(F, 0.0, cfg.R0, 0.0, SolveFor::P, cfg.tol);
        bp.indep = "t";  // the wall radius evolves in time
        describe_base(rep, F, bp);
        PsiForm pf = build_psi_form(F, bp, 1, 2);
        detail::describe_psi(rep, pf);
        auto branches = solve_psi_form(pf);
        detail::describe_branches(rep, branches);
        const ClosedFormSolution& sol = branches.front().sol;

        double t_closed = collapse_time(sol);
        BubbleRun run = integrate_bubble(cfg.R0, cfg.p_f, cfg.rho);
        double t_half = 0.5 * run.collapse_time;
        ValidationReport vs = compare_curves([&](double t) { return sol.value(t); },
                                             [&](double t) { return run.traj.value(t); }, 0.0,
                                             t_half, 201);
        auto& checks = rep.add("checks");
        checks.put("model collapse time sqrt(2)*R0", t_closed);
        checks.put("numeric collapse time", run.collapse_time);
        checks.put("max |model - numeric| on [0, half collapse]", vs.max_abs_error);
        checks.put("first-integral drift", run.max_drift);
        checks.put("integration stop", run.stop_reason);
        checks.note("the quadratic model tracks the wall until roughly half the collapse "
                    "time; the true collapse accelerates past it near the end");
        if (!cfg.csv_path.empty()) {
            double t_end = run.traj.hi();
            auto rows = detail::sample_pair([&](double t) { return sol.value(t); },
                                            [&](double t) { return run.traj.value(t); }, 0.0,
                                            t_end, 201);
            write_csv(cfg.csv_path, {"t", "radius_a", "radius_b", "abs_error"}, rows);
        }
        return rep;
    }

    throw SolveError(SolveFault::BadPrecondition,
                     "unknown example id (expected 1, 1bis, 2, 2bis, 2ter, 3 or 4)");
}

}  // namespace dini
