#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>

#include "dini/error.hpp"
#include "dini/expr.hpp"

namespace dini {

/// Recursive-descent parser for the expression grammar used across the tool:
///
///   expr    := term (('+' | '-') term)*
///   term    := factor (('*' | '/') factor)*
///   factor  := '-' factor | power
///   power   := atom ('^' exponent)?
///   atom    := number | 'pi' | 'x' | 't' | 'p' | 'q'
///            | ('sin'|'cos'|'exp'|'log'|'sqrt') '(' expr ')'
///            | '(' expr ')'
///
/// The exponent after '^' is an exact literal: an unsigned integer, or a signed
/// integer / fraction / decimal in parentheses, e.g. x^2, p^(-2), q^(3/4).
/// Decimal literals everywhere are converted exactly (0.25 -> 1/4).
class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Expr parse_all() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, pos_);
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) fail(what);
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept('+')) e = e + parse_term();
            else if (accept('-')) e = e - parse_term();
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (accept('*')) e = e * parse_factor();
            else if (accept('/')) e = e / parse_factor();
            else return e;
        }
    }

    Expr parse_factor() {
        if (accept('-')) return neg(parse_factor());
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (accept('^')) return pow(std::move(base), parse_exponent());
        return base;
    }

    Rational parse_exponent() {
        skip_ws();
        if (accept('(')) {
            bool negative = accept('-');
            Rational r = parse_rational_literal();
            if (accept('/')) {
                Rational d = parse_rational_literal();
                r = r / d;
            }
            expect(')', "expected ')' after exponent");
            return negative ? -r : r;
        }
        return parse_rational_literal();
    }

    Rational parse_rational_literal() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            fail("expected a number");
        long long ip = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            int d = s_[pos_] - '0';
            if (ip > (INT64_MAX - d) / 10) { pos_ = start; fail("number literal too large"); }
            ip = ip * 10 + d;
            ++pos_;
        }
        Rational r(ip);
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                fail("expected digits after decimal point");
            Rational scale(1, 10);
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                try {
                    r = r + scale * Rational(s_[pos_] - '0');
                    scale = scale / Rational(10);
                } catch (const std::exception&) {
                    // Too many digits for the exact decimal route: such literals
                    // denote doubles, so take the exact dyadic of their value.
                    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                        ++pos_;
                    std::string text(s_.substr(start, pos_ - start));
                    return Rational::from_double(std::strtod(text.c_str(), nullptr));
                }
                ++pos_;
            }
        }
        return r;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return num(parse_rational_literal());
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            expect(')', "expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string id(s_.substr(start, pos_ - start));
            if (id == "pi") return pi();
            if (id == "x" || id == "t" || id == "p" || id == "q") return var(id);
            if (id == "sin" || id == "cos" || id == "exp" || id == "log" || id == "sqrt") {
                expect('(', "expected '(' after function name");
                Expr a = parse_expr();
                expect(')', "expected ')'");
                if (id == "sin") return sin(std::move(a));
                if (id == "cos") return cos(std::move(a));
                if (id == "exp") return exp(std::move(a));
                if (id == "log") return log(std::move(a));
                return sqrt(std::move(a));
            }
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

inline Expr parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace dini
