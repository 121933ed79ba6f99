#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "dini/base_point.hpp"
#include "dini/closed_form.hpp"
#include "dini/error.hpp"
#include "dini/expr.hpp"
#include "dini/implicit_jet.hpp"

namespace dini {

struct TrajectoryPoint {
    double x = 0.0;
    double y = 0.0;
    double dy = 0.0;
};

struct Trajectory {
    std::string indep = "x";
    double step = 0.0;
    std::vector<TrajectoryPoint> pts;  // ascending in x
    bool domain_hit = false;           // the right-hand side failed inside the interval
    std::string stop_reason = "interval";

    double lo() const { return pts.front().x; }
    double hi() const { return pts.back().x; }

    /// Cubic interpolation through the four nodes around x (window clamped at
    /// the ends). Outside the covered interval the trajectory has no opinion.
    double value(double x) const {
        if (pts.empty() || x < lo() - 1e-12 || x > hi() + 1e-12)
            throw NumericError(NumericFault::IntervalMismatch,
                               "query point lies outside the integrated interval");
        if (pts.size() == 1) return pts[0].y;
        auto it = std::lower_bound(pts.begin(), pts.end(), x,
                                   [](const TrajectoryPoint& p, double v) { return p.x < v; });
        std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
        std::ptrdiff_t i = it - pts.begin();
        std::ptrdiff_t first = std::clamp<std::ptrdiff_t>(i - 2, 0, std::max<std::ptrdiff_t>(0, n - 4));
        std::ptrdiff_t count = std::min<std::ptrdiff_t>(4, n);
        double acc = 0.0;
        for (std::ptrdiff_t a = first; a < first + count; ++a) {
            double w = pts[a].y;
            for (std::ptrdiff_t b = first; b < first + count; ++b) {
                if (a == b) continue;
                w *= (x - pts[b].x) / (pts[a].x - pts[b].x);
            }
            acc += w;
        }
        return acc;
    }
};

namespace detail {

inline void rk4_step(const std::function<double(double, double)>& f, double& x, double& y,
                     double h) {
    double k1 = f(x, y);
    double k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    double k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    double k4 = f(x + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x += h;
}

}  // namespace detail

/// Classic fixed-step integration of y' = f(x, y) across [lo, hi] through
/// (x0, p0).  Domain faults of the right-hand side truncate the affected side
/// instead of aborting.
inline Trajectory integrate_explicit(const Expr& rhs, const std::string& indep, double x0,
                                     double p0, double lo, double hi, double step = 0.0) {
    if (!(lo <= x0 && x0 <= hi))
        throw NumericError(NumericFault::IntervalMismatch,
                           "the anchor must lie inside the integration interval");
    {
        Bindings probe;
        probe.set(indep, x0).set("p", p0);
        evaluate(rhs, probe);  // unknown-symbol faults should abort, not truncate
    }
    if (step <= 0.0) step = (hi - lo) / 4096.0;
    if (step <= 0.0) step = 1.0;

    auto f = [&](double x, double y) {
        Bindings at;
        at.set(indep, x).set("p", y);
        return evaluate(rhs, at);
    };

    Trajectory tr;
    tr.indep = indep;
    tr.step = step;

    auto march = [&](double dir, std::vector<TrajectoryPoint>& out) {
        double limit = dir > 0 ? hi : lo;
        double x = x0, y = p0;
        long long nsteps = static_cast<long long>(std::floor((limit - x0) / (dir * step) + 1e-9));
        try {
            out.push_back({x, y, f(x, y)});
            for (long long i = 0; i < nsteps; ++i) {
                double h = dir * step;
                detail::rk4_step(f, x, y, h);
                if (!std::isfinite(y)) {
                    tr.domain_hit = true;
                    tr.stop_reason = "diverged";
                    return;
                }
                out.push_back({x, y, f(x, y)});
            }
            if (dir * (limit - x) > 1e-12 * (1.0 + std::fabs(limit))) {
                detail::rk4_step(f, x, y, limit - x);
                if (std::isfinite(y)) out.push_back({x, y, f(x, y)});
            }
        } catch (const EvalError&) {
            tr.domain_hit = true;
            tr.stop_reason = "domain";
        }
    };

    std::vector<TrajectoryPoint> fwd, bwd;
    march(1.0, fwd);
    march(-1.0, bwd);
    std::reverse(bwd.begin(), bwd.end());
    if (!bwd.empty()) bwd.pop_back();  // drop duplicate anchor
    tr.pts = std::move(bwd);
    tr.pts.insert(tr.pts.end(), fwd.begin(), fwd.end());
    if (tr.pts.empty())
        throw NumericError(NumericFault::IntervalMismatch, "integration produced no points");
    return tr;
}

/// Collapse of an empty cavity:  y y'' + (3/2) y'^2 = -P / rho  from (R0, 0).
/// Fixed-step integration with an exact first-integral drift gate; the run ends
/// at the radius floor or, in the terminal stiff regime, when the per-step
/// displacement monitor trips.  The collapse instant is extrapolated from the
/// last accepted nodes.
struct BubbleRun {
    Trajectory traj;           // radius over time
    double collapse_time = 0.0;
    double max_drift = 0.0;    // worst first-integral violation seen
    double floor = 0.0;        // radius floor used
    std::string stop_reason;   // "floor" or "monitor"
};

inline BubbleRun integrate_bubble(double R0, double p_f, double rho, double dt = 0.0) {
    if (!(R0 > 0) || !(p_f > 0) || !(rho > 0))
        throw NumericError(NumericFault::IntervalMismatch,
                           "radius, pressure and density must be positive");
    if (dt <= 0.0) dt = 1e-5 * R0 * std::sqrt(rho / p_f);

    const double a = p_f / rho;
    const double floor = 1e-3 * R0;
    const double drift_cap = 1e-6 * R0 * R0 * R0 * a;
    const double stiff_zone = 0.2 * R0;

    auto acc = [&](double y, double v) { return -(a + 1.5 * v * v) / y; };
    // First integral of the motion: y^3 v^2 - (2/3) a (R0^3 - y^3) = 0.
    auto drift = [&](double y, double v) {
        return std::fabs(y * y * y * v * v - (2.0 / 3.0) * a * (R0 * R0 * R0 - y * y * y));
    };

    BubbleRun run;
    run.floor = floor;
    run.traj.indep = "t";
    run.traj.step = dt;

    double t = 0.0, y = R0, v = 0.0;
    run.traj.pts.push_back({t, y, v});
    for (;;) {
        // RK4 on the first-order system (y, v).
        double k1y = v, k1v = acc(y, v);
        double k2y = v + 0.5 * dt * k1v, k2v = acc(y + 0.5 * dt * k1y, v + 0.5 * dt * k1v);
        double k3y = v + 0.5 * dt * k2v, k3v = acc(y + 0.5 * dt * k2y, v + 0.5 * dt * k2v);
        double k4y = v + dt * k3v, k4v = acc(y + dt * k3y, v + dt * k3v);
        double yn = y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        double vn = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        double tn = t + dt;

        if (!(yn > 0.0) || !std::isfinite(yn) || !std::isfinite(vn)) {
            run.stop_reason = "floor";
            break;
        }
        double d = drift(yn, vn);
        if (d > drift_cap) {
            if (yn > stiff_zone)
                throw NumericError(NumericFault::StepTooLarge,
                                   "first-integral drift exceeded its budget away from the "
                                   "collapse region; reduce the time step");
            run.stop_reason = "monitor";
            break;
        }
        run.max_drift = std::max(run.max_drift, d);
        t = tn;
        y = yn;
        v = vn;
        run.traj.pts.push_back({t, y, v});
        if (y <= floor) {
            run.stop_reason = "floor";
            break;
        }
        if (std::fabs(v) * dt >= 0.02 * y) {
            if (y > stiff_zone)
                throw NumericError(NumericFault::StepTooLarge,
                                   "displacement per step became large away from the collapse "
                                   "region; reduce the time step");
            run.stop_reason = "monitor";
            break;
        }
    }

    // Extrapolate the zero crossing from the last accepted nodes: quadratic fit
    // through the final three, linear fallback.
    const auto& P = run.traj.pts;
    std::size_t N = P.size();
    if (N >= 3) {
        double t2 = P[N - 1].x;
        double s0 = P[N - 3].x - t2, s1 = P[N - 2].x - t2;
        double y0 = P[N - 3].y, y1 = P[N - 2].y, y2 = P[N - 1].y;
        // y(s) = A + B s + C s^2 with y(0) = y2.
        double A = y2;
        double C = ((y0 - A) / s0 - (y1 - A) / s1) / (s0 - s1);
        double B = (y1 - A) / s1 - C * s1;
        double disc = B * B - 4.0 * C * A;
        double s_hit = HUGE_VAL;
        if (std::fabs(C) > 1e-300 && disc >= 0.0) {
            double sq = std::sqrt(disc);
            for (double cand : {(-B + sq) / (2.0 * C), (-B - sq) / (2.0 * C)})
                if (cand > 0.0 && cand < s_hit) s_hit = cand;
        }
        if (s_hit == HUGE_VAL && B < 0.0) s_hit = -A / B;
        run.collapse_time = s_hit == HUGE_VAL ? t2 : t2 + s_hit;
    } else {
        run.collapse_time = P.back().x;
    }
    return run;
}

/// How well a candidate solution satisfies F(x, u, u') pointwise.
struct ResidualProfile {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    int skipped = 0;  // sample points where F itself was not evaluable
    bool domain_hit = false;
    std::vector<std::array<double, 4>> rows;  // x, u, u', residual
};

inline ResidualProfile residual_profile(const Expr& F, const std::string& indep,
                                        const std::function<double(double)>& u,
                                        const std::function<double(double)>& du, double lo,
                                        double hi, int samples = 201) {
    if (!(lo <= hi) || samples < 1)
        throw NumericError(NumericFault::IntervalMismatch,
                           "need an ordered interval and at least one sample");
    if (lo == hi) samples = 1;  // degenerate interval: a single-sample report
    ResidualProfile out;
    double total = 0.0;
    int used = 0;
    for (int i = 0; i < samples; ++i) {
        double x = samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1);
        double uu, dd, r;
        try {
            uu = u(x);
            dd = du(x);
            Bindings at;
            at.set(indep, x).set("p", uu).set("q", dd);
            r = evaluate(F, at);
        } catch (const EvalError&) {
            ++out.skipped;
            out.domain_hit = true;
            continue;
        }
        out.rows.push_back({x, uu, dd, r});
        out.max_abs = std::max(out.max_abs, std::fabs(r));
        total += std::fabs(r);
        ++used;
    }
    if (used > 0) out.mean_abs = total / used;
    return out;
}

inline ResidualProfile residual_profile(const Expr& F, const ClosedFormSolution& sol, double lo,
                                        double hi, int samples = 201) {
    return residual_profile(
        F, sol.indep, [&](double x) { return sol.value(x); },
        [&](double x) { return sol.derivative(x); }, lo, hi, samples);
}

inline ResidualProfile residual_profile(const Expr& F, const Expr& solution, double lo, double hi,
                                        int samples = 201) {
    std::string indep = infer_independent(F);
    Expr dsol = differentiate(solution, indep);
    auto ev = [indep](const Expr& e, double x) {
        Bindings at;
        at.set(indep, x);
        return evaluate(e, at);
    };
    return residual_profile(
        F, indep, [&, solution](double x) { return ev(solution, x); },
        [&, dsol](double x) { return ev(dsol, x); }, lo, hi, samples);
}

/// Derivatives of the resolved branch by divided differences on a grid of
/// nearby roots, for cross-checking the symbolic sweep.  Each grid node's root
/// is found by a Newton iteration seeded from an already-solved neighbour and
/// must stay within the seed's trust radius.
inline ImplicitJet finite_difference_jet(const Expr& F, const BasePoint& base, int m, int n,
                                         double hx = 1e-2, double hf = 1e-2) {
    if (m < 0 || n < 0 || m + n > 4)
        throw SolveError(SolveFault::OrderTooHigh,
                         "derivative rectangle is limited to total order 4");
    if (!(hx > 0.0 && hx <= 1e-2) || !(hf > 0.0 && hf <= 1e-2))
        throw SolveError(SolveFault::BadPrecondition, "step sizes must lie in (0, 1e-2]");
    const std::string solved = base.mode == SolveFor::Q ? "q" : "p";
    const std::string free_slot = base.mode == SolveFor::Q ? "p" : "q";
    const double free0 = base.mode == SolveFor::Q ? base.p0 : base.q0;
    const double solved0 = base.mode == SolveFor::Q ? base.q0 : base.p0;

    const int ra = m >= 3 ? 2 : (m >= 2 ? 1 : (m >= 1 ? 1 : 0));
    const int rb = n >= 3 ? 2 : (n >= 2 ? 1 : (n >= 1 ? 1 : 0));
    const double trust = 0.5 * (1.0 + std::fabs(solved0));

    auto root_at = [&](double xa, double fb, double seed) {
        Bindings at;
        at.set(base.indep, xa).set(free_slot, fb);
        Expr dF = differentiate(F, solved);
        double s = seed;
        for (int it = 0; it < 80; ++it) {
            at.set(solved, s);
            double g = evaluate(F, at);
            double gp = evaluate(dF, at);
            if (gp == 0.0) break;
            double step = g / gp;
            s -= step;
            if (std::fabs(s - seed) > trust)
                throw NumericError(NumericFault::RootLost,
                                   "root continuation left its trust region");
            if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(s))) break;
        }
        at.set(solved, s);
        if (std::fabs(evaluate(F, at)) > 1e-7 * (1.0 + std::fabs(s)))
            throw NumericError(NumericFault::RootLost,
                               "root continuation failed to converge on a grid node");
        return s;
    };

    // Solve the grid outwards from the centre so each node has a close seed.
    const int A = 2 * ra + 1, B = 2 * rb + 1;
    std::vector<double> G(static_cast<std::size_t>(A) * B, 0.0);
    std::vector<char> done(static_cast<std::size_t>(A) * B, 0);
    auto at = [&](int a, int b) -> double& {
        return G[static_cast<std::size_t>(a + ra) * B + (b + rb)];
    };
    auto is_done = [&](int a, int b) -> char& {
        return done[static_cast<std::size_t>(a + ra) * B + (b + rb)];
    };
    at(0, 0) = root_at(base.x0, free0, solved0);
    is_done(0, 0) = 1;
    for (int ring = 1; ring <= ra + rb; ++ring)
        for (int a = -ra; a <= ra; ++a)
            for (int b = -rb; b <= rb; ++b) {
                if (std::abs(a) + std::abs(b) != ring || is_done(a, b)) continue;
                int sa = a - (a > 0 ? 1 : (a < 0 ? -1 : 0));
                int sb = b;
                if (sa == a) sb = b - (b > 0 ? 1 : (b < 0 ? -1 : 0));
                at(a, b) = root_at(base.x0 + a * hx, free0 + b * hf, at(sa, sb));
                is_done(a, b) = 1;
            }

    // Tensor products of central-difference weights.
    auto weights = [](int order, int radius) {
        std::vector<double> w(2 * radius + 1, 0.0);
        auto W = [&](int off) -> double& { return w[off + radius]; };
        switch (order) {
            case 0: W(0) = 1.0; break;
            case 1: W(-1) = -0.5; W(1) = 0.5; break;
            case 2: W(-1) = 1.0; W(0) = -2.0; W(1) = 1.0; break;
            default: W(-2) = -0.5; W(-1) = 1.0; W(1) = -1.0; W(2) = 0.5; break;
        }
        return w;
    };

    ImplicitJet jet;
    jet.base = base;
    jet.m = m;
    jet.n = n;
    jet.d.assign(static_cast<std::size_t>(m + 1) * (n + 1), 0.0);
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j) {
            std::vector<double> wa = weights(i, ra), wb = weights(j, rb);
            double acc = 0.0;
            for (int a = -ra; a <= ra; ++a)
                for (int b = -rb; b <= rb; ++b) {
                    double w = wa[a + ra] * wb[b + rb];
                    if (w != 0.0) acc += w * at(a, b);
                }
            jet.D(i, j) = acc / (std::pow(hx, i) * std::pow(hf, j));
        }
    return jet;
}

/// Pointwise comparison of two curves over [lo, hi].
struct ValidationReport {
    double lo = 0.0, hi = 0.0;
    int samples = 0;
    double max_abs_error = 0.0;
    double mean_abs_error = 0.0;
    std::vector<std::array<double, 4>> rows;  // x, a, b, |a-b|
};

inline ValidationReport compare_curves(const std::function<double(double)>& a,
                                       const std::function<double(double)>& b, double lo,
                                       double hi, int samples = 201) {
    if (!(lo <= hi) || samples < 1)
        throw NumericError(NumericFault::IntervalMismatch,
                           "need an ordered interval and at least one sample");
    if (lo == hi) samples = 1;  // degenerate interval: a single-sample report
    ValidationReport out;
    out.lo = lo;
    out.hi = hi;
    out.samples = samples;
    double total = 0.0;
    for (int i = 0; i < samples; ++i) {
        double x = samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1);
        double va = a(x), vb = b(x);
        double err = std::fabs(va - vb);
        out.rows.push_back({x, va, vb, err});
        out.max_abs_error = std::max(out.max_abs_error, err);
        total += err;
    }
    out.mean_abs_error = total / samples;
    return out;
}

/// Four-column CSV with full double round-trip precision and LF line ends.
inline void write_csv(const std::string& path, const std::array<std::string, 4>& header,
                      const std::vector<std::array<double, 4>>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << header[0] << ',' << header[1] << ',' << header[2] << ',' << header[3] << '\n';
    char buf[140];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r[0], r[1], r[2], r[3]);
        f << buf;
    }
}

}  // namespace dini
