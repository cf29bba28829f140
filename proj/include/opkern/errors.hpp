#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opkern {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point or region lies outside the domain an operation is defined on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range arguments.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A kernel evaluator threw or produced non-finite / mis-sized output.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// A statistical estimate (regression, fit) cannot be formed from the data.
class EstimationError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// One step of a refinement loop: quadrature order and the tracked values.
struct RefinementStep {
    int order = 0;
    std::vector<double> tracked;
    double max_rel_change = 0.0;
};

/// Refinement hit its order cap before the tracked values settled.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<RefinementStep> history)
        : Error(what), history_(std::move(history)) {}

    const std::vector<RefinementStep>& history() const noexcept { return history_; }

private:
    std::vector<RefinementStep> history_;
};

}  // namespace opkern
