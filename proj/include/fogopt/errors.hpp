#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace fogopt {

// Base class of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number (0 when not applicable).
class ParseError : public Error
{
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what), line_(line)
    {}
    std::size_t line() const { return line_; }
private:
    std::size_t line_;
};

// A value violates a documented invariant.
class ValidationError : public Error
{
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error
{
public:
    using Error::Error;
};

// Latency requested at a transmit power giving zero rate.
class DegenerateRateError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

// Iterative solver failure. best_iterate holds the best point seen so far
// so callers can continue with a warning.
class SolverError : public Error
{
public:
    SolverError(const std::string& what, std::vector<double> best_iterate = {})
        : Error(what), best_iterate_(std::move(best_iterate))
    {}
    const std::vector<double>& best_iterate() const { return best_iterate_; }
private:
    std::vector<double> best_iterate_;
};

// Starting point handed to the convex solver is not strictly feasible.
class InfeasibleStartError : public SolverError
{
public:
    using SolverError::SolverError;
};

// Outer loop (fractional programming or block coordinate descent) ran out
// of iterations before meeting its convergence rule.
class ConvergenceError : public SolverError
{
public:
    using SolverError::SolverError;
};

} // namespace fogopt
