#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace semsar {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad shapes, non-finite values, out-of-range parameters.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A class or sample set too degenerate to estimate from (empty, constant).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Iterative solver produced a non-finite objective.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, std::vector<double> trace)
        : Error(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

} // namespace semsar
