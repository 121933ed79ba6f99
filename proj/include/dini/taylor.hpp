#pragma once

#include <string>
#include <vector>

#include "dini/expr.hpp"

namespace dini {

struct TaylorAxis {
    std::string var;
    double center = 0.0;
    int order = 0;
};

/// Dense truncated expansion  sum_ij c[i][j] (u - cu)^i (v - cv)^j.
class TruncatedPoly {
public:
    TruncatedPoly() = default;
    TruncatedPoly(TaylorAxis u, TaylorAxis v)
        : u_(std::move(u)), v_(std::move(v)),
          c_(static_cast<std::size_t>(u_.order + 1) * (v_.order + 1), 0.0) {}

    const TaylorAxis& axis_u() const { return u_; }
    const TaylorAxis& axis_v() const { return v_; }

    double coeff(int i, int j) const { return c_[idx(i, j)]; }
    double& coeff(int i, int j) { return c_[idx(i, j)]; }

    double value(double u, double v) const {
        double du = u - u_.center, dv = v - v_.center;
        // Horner in v inside Horner in u.
        double acc = 0.0;
        for (int i = u_.order; i >= 0; --i) {
            double row = 0.0;
            for (int j = v_.order; j >= 0; --j) row = row * dv + coeff(i, j);
            acc = acc * du + row;
        }
        return acc;
    }

    Expr to_expr() const {
        Expr du = shifted(u_);
        Expr dv = shifted(v_);
        Expr acc = num(0);
        bool first = true;
        for (int i = 0; i <= u_.order; ++i)
            for (int j = 0; j <= v_.order; ++j) {
                double c = coeff(i, j);
                if (c == 0.0) continue;
                Expr term = num(Rational::from_double(c));
                if (i > 0) term = term * pow(du, Rational(i));
                if (j > 0) term = term * pow(dv, Rational(j));
                acc = first ? term : acc + term;
                first = false;
            }
        return simplify(acc);
    }

private:
    static Expr shifted(const TaylorAxis& a) {
        if (a.center == 0.0) return var(a.var);
        return var(a.var) - num(Rational::from_double(a.center));
    }
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * (v_.order + 1) + j;
    }

    TaylorAxis u_, v_;
    std::vector<double> c_;
};

/// c[i][j] = (d^i/du^i d^j/dv^j f)(center) / (i! j!), by symbolic differentiation.
inline TruncatedPoly taylor_coefficients(const Expr& f, const TaylorAxis& u, const TaylorAxis& v) {
    TruncatedPoly out(u, v);
    Bindings at;
    at.set(u.var, u.center).set(v.var, v.center);
    Expr du = f;
    double ifact = 1.0;
    for (int i = 0; i <= u.order; ++i) {
        if (i > 0) {
            du = differentiate(du, u.var);
            ifact *= i;
        }
        Expr dv = du;
        double jfact = 1.0;
        for (int j = 0; j <= v.order; ++j) {
            if (j > 0) {
                dv = differentiate(dv, v.var);
                jfact *= j;
            }
            out.coeff(i, j) = evaluate(dv, at) / (ifact * jfact);
        }
    }
    return out;
}

}  // namespace dini
