#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace dini {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string err_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}
}  // namespace detail

/// Syntax error in the expression grammar; `offset` is the byte position in the input.
struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : Error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

enum class EvalFault { UnboundVariable, DomainViolation };

/// Evaluation failure: unbound variable or a domain violation (log/sqrt/pow/division).
struct EvalError : Error {
    EvalFault fault;
    EvalError(EvalFault f, const std::string& msg) : Error(msg), fault(f) {}
};

/// Base-point validation failures (the local solvability preconditions).
struct BasePointError : Error {
    using Error::Error;
};

struct ResidualTooLarge : BasePointError {
    double residual, tolerance;
    ResidualTooLarge(double r, double tol)
        : BasePointError("|F| = " + detail::err_num(r) + " at the base point exceeds tolerance " +
                         detail::err_num(tol)),
          residual(r), tolerance(tol) {}
};

struct DegenerateDerivative : BasePointError {
    double value, tolerance;
    std::string partial;  // which partial is too small, e.g. "dF/dq"
    DegenerateDerivative(const std::string& which, double v, double tol)
        : BasePointError("|" + which + "| = " + detail::err_num(v) +
                         " at the base point is within degeneracy tolerance " + detail::err_num(tol)),
          value(v), tolerance(tol), partial(which) {}
};

struct UnknownVariable : BasePointError {
    UnknownVariable(const std::string& msg) : BasePointError(msg) {}
};

enum class SolveFault {
    WrongMode,        // builder applied to a jet of the other mode
    OrderTooHigh,     // requested jet/series order outside the supported range
    NoRoot,           // no root of the scalar equation in the bracket
    NoRealBranch,     // branch system has no real solution
    UnderDetermined,  // an equation introduces more than one new unknown (or none at all)
    NotQuadratic,     // branch equation is not polynomial of degree <= 2 in its unknown
    NoZeroCrossing,   // no positive zero found
    BadPrecondition,  // caller violated a documented precondition
    UnsupportedForm,  // equation shape outside the representable family
};

struct SolveError : Error {
    SolveFault fault;
    SolveError(SolveFault f, const std::string& msg) : Error(msg), fault(f) {}
};

enum class NumericFault {
    StepTooLarge,      // instability detected by the invariant monitor
    RootLost,          // root continuation left its bracket
    IntervalMismatch,  // requested interval not covered by the data
};

struct NumericError : Error {
    NumericFault fault;
    NumericError(NumericFault f, const std::string& msg) : Error(msg), fault(f) {}
};

}  // namespace dini
