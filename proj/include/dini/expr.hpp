#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <initializer_list>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dini/error.hpp"
#include "dini/rational.hpp"

namespace dini {

enum class Kind {
    Number,    // exact rational literal
    Constant,  // named constant (pi)
    Variable,  // named variable; the grammar admits x, t, p, q
    Neg, Sin, Cos, Exp, Log, Sqrt,
    Add, Sub, Mul, Div,
    Pow,       // base^r with exact rational exponent r
};

struct ExprNode;

/// Immutable expression tree with value semantics (nodes are shared, never mutated).
/// A default-constructed Expr is the number 0 (encoded as a null node).
class Expr {
public:
    Expr() = default;
    explicit Expr(Rational r);

    Kind kind() const;
    const Rational& number() const;
    const std::string& name() const;
    const Rational& exponent() const;
    const Expr& lhs() const;
    const Expr& rhs() const;
    const Expr& arg() const;

    bool is_number(long long v) const { return kind() == Kind::Number && number() == Rational(v); }

    static Expr make(Kind k, Rational value, std::string name, Rational expo, Expr a, Expr b);

private:
    std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
    Kind kind;
    Rational value;    // Number
    std::string name;  // Variable / Constant
    Rational expo;     // Pow
    Expr a, b;
};

inline Expr::Expr(Rational r)
    : node_(std::make_shared<ExprNode>(ExprNode{Kind::Number, std::move(r), {}, {}, {}, {}})) {}
inline Kind Expr::kind() const { return node_ ? node_->kind : Kind::Number; }
inline const Rational& Expr::number() const {
    static const Rational zero(0);
    return node_ ? node_->value : zero;
}
inline const std::string& Expr::name() const {
    static const std::string empty;
    return node_ ? node_->name : empty;
}
inline const Rational& Expr::exponent() const {
    static const Rational zero(0);
    return node_ ? node_->expo : zero;
}
inline const Expr& Expr::lhs() const {
    static const Expr zero;
    return node_ ? node_->a : zero;
}
inline const Expr& Expr::rhs() const {
    static const Expr zero;
    return node_ ? node_->b : zero;
}
inline const Expr& Expr::arg() const { return lhs(); }

inline Expr Expr::make(Kind k, Rational value, std::string name, Rational expo, Expr a, Expr b) {
    Expr e;
    e.node_ = std::make_shared<ExprNode>(
        ExprNode{k, std::move(value), std::move(name), std::move(expo), std::move(a), std::move(b)});
    return e;
}

inline Expr num(Rational r) { return Expr(std::move(r)); }
inline Expr num(long long n) { return Expr(Rational(n)); }
inline Expr num(long long n, long long d) { return Expr(Rational(n, d)); }
inline Expr var(std::string name) { return Expr::make(Kind::Variable, {}, std::move(name), {}, {}, {}); }
inline Expr pi() { return Expr::make(Kind::Constant, {}, "pi", {}, {}, {}); }
inline Expr neg(Expr e) { return Expr::make(Kind::Neg, {}, {}, {}, std::move(e), {}); }
inline Expr sin(Expr e) { return Expr::make(Kind::Sin, {}, {}, {}, std::move(e), {}); }
inline Expr cos(Expr e) { return Expr::make(Kind::Cos, {}, {}, {}, std::move(e), {}); }
inline Expr exp(Expr e) { return Expr::make(Kind::Exp, {}, {}, {}, std::move(e), {}); }
inline Expr log(Expr e) { return Expr::make(Kind::Log, {}, {}, {}, std::move(e), {}); }
inline Expr sqrt(Expr e) { return Expr::make(Kind::Sqrt, {}, {}, {}, std::move(e), {}); }
inline Expr pow(Expr base, Rational r) {
    return Expr::make(Kind::Pow, {}, {}, std::move(r), std::move(base), {});
}
inline Expr operator+(Expr a, Expr b) { return Expr::make(Kind::Add, {}, {}, {}, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::make(Kind::Sub, {}, {}, {}, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::make(Kind::Mul, {}, {}, {}, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return Expr::make(Kind::Div, {}, {}, {}, std::move(a), std::move(b)); }

/// Variable bindings for evaluation; linear scan is faster than a map at these sizes.
class Bindings {
public:
    Bindings() = default;
    Bindings(std::initializer_list<std::pair<std::string, double>> init) {
        for (auto& kv : init) set(kv.first, kv.second);
    }
    Bindings& set(const std::string& name, double value) {
        for (auto& kv : v_)
            if (kv.first == name) { kv.second = value; return *this; }
        v_.emplace_back(name, value);
        return *this;
    }
    const double* find(const std::string& name) const {
        for (auto& kv : v_)
            if (kv.first == name) return &kv.second;
        return nullptr;
    }

private:
    std::vector<std::pair<std::string, double>> v_;
};

inline double evaluate(const Expr& e, const Bindings& env) {
    switch (e.kind()) {
        case Kind::Number: return e.number().to_double();
        case Kind::Constant: return std::numbers::pi;
        case Kind::Variable: {
            if (const double* v = env.find(e.name())) return *v;
            throw EvalError(EvalFault::UnboundVariable, "unbound variable '" + e.name() + "'");
        }
        case Kind::Neg: return -evaluate(e.arg(), env);
        case Kind::Sin: return std::sin(evaluate(e.arg(), env));
        case Kind::Cos: return std::cos(evaluate(e.arg(), env));
        case Kind::Exp: return std::exp(evaluate(e.arg(), env));
        case Kind::Log: {
            double a = evaluate(e.arg(), env);
            if (a <= 0) throw EvalError(EvalFault::DomainViolation, "log of non-positive value");
            return std::log(a);
        }
        case Kind::Sqrt: {
            double a = evaluate(e.arg(), env);
            if (a < 0) throw EvalError(EvalFault::DomainViolation, "sqrt of negative value");
            return std::sqrt(a);
        }
        case Kind::Add: return evaluate(e.lhs(), env) + evaluate(e.rhs(), env);
        case Kind::Sub: return evaluate(e.lhs(), env) - evaluate(e.rhs(), env);
        case Kind::Mul: return evaluate(e.lhs(), env) * evaluate(e.rhs(), env);
        case Kind::Div: {
            double a = evaluate(e.lhs(), env), b = evaluate(e.rhs(), env);
            if (b == 0) throw EvalError(EvalFault::DomainViolation, "division by zero");
            return a / b;
        }
        case Kind::Pow: {
            double base = evaluate(e.lhs(), env);
            const Rational& r = e.exponent();
            if (r.is_integer()) {
                long long n = r.num();
                if (base == 0 && n < 0)
                    throw EvalError(EvalFault::DomainViolation, "zero base with negative exponent");
                double acc = 1.0, b = n < 0 ? 1.0 / base : base;
                for (long long i = 0, m = std::llabs(n); i < m; ++i) acc *= b;
                return acc;
            }
            if (base < 0)
                throw EvalError(EvalFault::DomainViolation,
                                "non-integer power of a negative base");
            if (base == 0) {
                if (r.negative())
                    throw EvalError(EvalFault::DomainViolation, "zero base with negative exponent");
                return 0.0;
            }
            return std::pow(base, r.to_double());
        }
    }
    throw Error("corrupt expression node");
}

inline bool same(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Kind::Number: return a.number() == b.number();
        case Kind::Constant:
        case Kind::Variable: return a.name() == b.name();
        case Kind::Pow: return a.exponent() == b.exponent() && same(a.lhs(), b.lhs());
        case Kind::Add: case Kind::Sub: case Kind::Mul: case Kind::Div:
            return same(a.lhs(), b.lhs()) && same(a.rhs(), b.rhs());
        default: return same(a.arg(), b.arg());
    }
}

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
    switch (e.kind()) {
        case Kind::Number: case Kind::Constant: return;
        case Kind::Variable: out.insert(e.name()); return;
        case Kind::Add: case Kind::Sub: case Kind::Mul: case Kind::Div:
            collect_variables(e.lhs(), out);
            collect_variables(e.rhs(), out);
            return;
        case Kind::Pow: collect_variables(e.lhs(), out); return;
        default: collect_variables(e.arg(), out); return;
    }
}

inline std::set<std::string> variables(const Expr& e) {
    std::set<std::string> out;
    collect_variables(e, out);
    return out;
}

/// Conservative bottom-up simplification: exact constant folding plus neutral/absorbing
/// element identities. Value-preserving at every binding, with the usual symbolic
/// conventions for e*0 and e^0. Constant folds that would overflow the rational type
/// are left symbolic.
inline Expr simplify(const Expr& e) {
    auto fold2 = [](Kind k, const Rational& a, const Rational& b) -> Rational {
        switch (k) {
            case Kind::Add: return a + b;
            case Kind::Sub: return a - b;
            case Kind::Mul: return a * b;
            default: return a / b;
        }
    };
    switch (e.kind()) {
        case Kind::Number: case Kind::Constant: case Kind::Variable: return e;
        case Kind::Neg: {
            Expr a = simplify(e.arg());
            if (a.kind() == Kind::Number) return num(-a.number());
            if (a.kind() == Kind::Neg) return a.arg();
            return neg(a);
        }
        case Kind::Sin: case Kind::Cos: case Kind::Exp: case Kind::Log: case Kind::Sqrt: {
            Expr a = simplify(e.arg());
            if (a.kind() == Kind::Number) {
                const Rational& r = a.number();
                if (r.is_zero()) {
                    if (e.kind() == Kind::Sin || e.kind() == Kind::Sqrt) return num(0);
                    if (e.kind() == Kind::Cos || e.kind() == Kind::Exp) return num(1);
                } else if (r == Rational(1)) {
                    if (e.kind() == Kind::Log) return num(0);
                    if (e.kind() == Kind::Sqrt) return num(1);
                }
            }
            return Expr::make(e.kind(), {}, {}, {}, std::move(a), {});
        }
        case Kind::Add: case Kind::Sub: case Kind::Mul: case Kind::Div: {
            Expr a = simplify(e.lhs());
            Expr b = simplify(e.rhs());
            bool an = a.kind() == Kind::Number, bn = b.kind() == Kind::Number;
            if (an && bn && !(e.kind() == Kind::Div && b.number().is_zero())) {
                try {
                    return num(fold2(e.kind(), a.number(), b.number()));
                } catch (const std::exception&) { /* keep symbolic */ }
            }
            switch (e.kind()) {
                case Kind::Add:
                    if (an && a.number().is_zero()) return b;
                    if (bn && b.number().is_zero()) return a;
                    break;
                case Kind::Sub:
                    if (bn && b.number().is_zero()) return a;
                    if (an && a.number().is_zero()) return simplify(neg(b));
                    if (same(a, b)) return num(0);
                    break;
                case Kind::Mul:
                    if ((an && a.number().is_zero()) || (bn && b.number().is_zero())) return num(0);
                    if (an && a.number() == Rational(1)) return b;
                    if (bn && b.number() == Rational(1)) return a;
                    break;
                default:  // Div
                    if (an && a.number().is_zero()) return num(0);
                    if (bn && b.number() == Rational(1)) return a;
                    break;
            }
            return Expr::make(e.kind(), {}, {}, {}, std::move(a), std::move(b));
        }
        case Kind::Pow: {
            Expr a = simplify(e.lhs());
            const Rational& r = e.exponent();
            if (r.is_zero()) return num(1);
            if (r == Rational(1)) return a;
            if (a.kind() == Kind::Number) {
                const Rational& base = a.number();
                if (base.is_zero() && !r.negative()) return num(0);
                if (base == Rational(1)) return num(1);
                if (r.is_integer()) {
                    try {
                        return num(base.pow_int(r.num()));
                    } catch (const std::exception&) { /* keep symbolic */ }
                }
            }
            return pow(std::move(a), r);
        }
    }
    throw Error("corrupt expression node");
}

inline Expr differentiate_raw(const Expr& e, const std::string& v) {
    switch (e.kind()) {
        case Kind::Number: case Kind::Constant: return num(0);
        case Kind::Variable: return num(e.name() == v ? 1 : 0);
        case Kind::Neg: return neg(differentiate_raw(e.arg(), v));
        case Kind::Sin: return cos(e.arg()) * differentiate_raw(e.arg(), v);
        case Kind::Cos: return neg(sin(e.arg())) * differentiate_raw(e.arg(), v);
        case Kind::Exp: return exp(e.arg()) * differentiate_raw(e.arg(), v);
        case Kind::Log: return differentiate_raw(e.arg(), v) / e.arg();
        case Kind::Sqrt: return differentiate_raw(e.arg(), v) / (num(2) * sqrt(e.arg()));
        case Kind::Add: return differentiate_raw(e.lhs(), v) + differentiate_raw(e.rhs(), v);
        case Kind::Sub: return differentiate_raw(e.lhs(), v) - differentiate_raw(e.rhs(), v);
        case Kind::Mul:
            return differentiate_raw(e.lhs(), v) * e.rhs() + e.lhs() * differentiate_raw(e.rhs(), v);
        case Kind::Div:
            return (differentiate_raw(e.lhs(), v) * e.rhs() -
                    e.lhs() * differentiate_raw(e.rhs(), v)) /
                   pow(e.rhs(), Rational(2));
        case Kind::Pow: {
            const Rational& r = e.exponent();
            return num(r) * pow(e.lhs(), r - Rational(1)) * differentiate_raw(e.lhs(), v);
        }
    }
    throw Error("corrupt expression node");
}

inline Expr differentiate(const Expr& e, const std::string& v) {
    return simplify(differentiate_raw(e, v));
}

inline Expr substitute(const Expr& e, const std::string& v, const Expr& replacement) {
    switch (e.kind()) {
        case Kind::Number: case Kind::Constant: return e;
        case Kind::Variable: return e.name() == v ? replacement : e;
        case Kind::Add: case Kind::Sub: case Kind::Mul: case Kind::Div:
            return Expr::make(e.kind(), {}, {}, {}, substitute(e.lhs(), v, replacement),
                              substitute(e.rhs(), v, replacement));
        case Kind::Pow:
            return pow(substitute(e.lhs(), v, replacement), e.exponent());
        default:
            return Expr::make(e.kind(), {}, {}, {}, substitute(e.arg(), v, replacement), {});
    }
}

namespace detail {

// Wide-denominator rationals (doubles funneled through from_double) print as
// decimal literals instead of unreadable dyadic fractions; the decimal is the
// shortest string that parses back to the same double.
inline bool prints_as_decimal(const Rational& r) { return r.den() > 4096; }

inline std::string number_text(const Rational& r) {
    if (!prints_as_decimal(r)) return r.str();
    double v = r.to_double();
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

// Printer precedence: add/sub < mul/div < unary minus < pow < atom.
inline int precedence(const Expr& e) {
    switch (e.kind()) {
        case Kind::Add: case Kind::Sub: return 1;
        case Kind::Mul: case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        case Kind::Number:
            if (e.number().negative()) return 1;  // parenthesize under any operator
            if (e.number().is_integer() || prints_as_decimal(e.number())) return 5;
            return 2;  // "a/b" is textually a division
        default: return 5;
    }
}

inline void print(const Expr& e, std::string& out, int parent, bool right_side) {
    int prec = precedence(e);
    bool wrap = prec < parent || (prec == parent && right_side && parent >= 1 && parent <= 2);
    if (wrap) out += '(';
    switch (e.kind()) {
        case Kind::Number: out += number_text(e.number()); break;
        case Kind::Constant: out += e.name(); break;
        case Kind::Variable: out += e.name(); break;
        case Kind::Neg:
            out += '-';
            print(e.arg(), out, 3, true);
            break;
        case Kind::Sin: case Kind::Cos: case Kind::Exp: case Kind::Log: case Kind::Sqrt: {
            const char* f = e.kind() == Kind::Sin   ? "sin"
                            : e.kind() == Kind::Cos ? "cos"
                            : e.kind() == Kind::Exp ? "exp"
                            : e.kind() == Kind::Log ? "log"
                                                    : "sqrt";
            out += f;
            out += '(';
            print(e.arg(), out, 0, false);
            out += ')';
            break;
        }
        case Kind::Add: case Kind::Sub: case Kind::Mul: case Kind::Div: {
            const char* op = e.kind() == Kind::Add   ? " + "
                             : e.kind() == Kind::Sub ? " - "
                             : e.kind() == Kind::Mul ? "*"
                                                     : "/";
            print(e.lhs(), out, prec, false);
            out += op;
            print(e.rhs(), out, prec, true);
            break;
        }
        case Kind::Pow: {
            print(e.lhs(), out, 5, false);
            out += '^';
            const Rational& r = e.exponent();
            if (r.is_integer() && !r.negative()) {
                out += r.str();
            } else {
                out += '(';
                out += r.str();
                out += ')';
            }
            break;
        }
    }
    if (wrap) out += ')';
}

}  // namespace detail

/// Renders in the same ASCII grammar that parse() accepts.
inline std::string to_text(const Expr& e) {
    std::string out;
    detail::print(e, out, 0, false);
    return out;
}

}  // namespace dini
