#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lumen {

enum class ErrorCode
{
    InvalidArgument,
    DegenerateDirection,
    ConstraintViolated,
    NumericError,
    Feasibility,
    Convergence,
    Floor,
    MinimalityViolation,
    Accounting,
    Config,
    Io,
};

/// Stable kebab-case name used on the command line and in reports.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class NumericError : public Error
{
public:
    NumericError(const std::string& message, std::size_t node)
        : Error(ErrorCode::NumericError, message), node_(node)
    {
    }
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class FeasibilityError : public Error
{
public:
    FeasibilityError(const std::string& message, double margin)
        : Error(ErrorCode::Feasibility, message), margin_(margin)
    {
    }
    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string& message, std::vector<double> residual_trace)
        : Error(ErrorCode::Convergence, message), trace_(std::move(residual_trace))
    {
    }
    /// Max relative residual after each sweep.
    const std::vector<double>& residual_trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

class FloorError : public Error
{
public:
    FloorError(const std::string& message, std::size_t atom, double residual)
        : Error(ErrorCode::Floor, message), atom_(atom), residual_(residual)
    {
    }
    std::size_t atom() const noexcept { return atom_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t atom_;
    double residual_;
};

class MinimalityViolation : public Error
{
public:
    MinimalityViolation(const std::string& message, std::vector<double> reference,
                        std::vector<double> trial)
        : Error(ErrorCode::MinimalityViolation, message),
          reference_(std::move(reference)), trial_(std::move(trial))
    {
    }
    const std::vector<double>& reference() const noexcept { return reference_; }
    const std::vector<double>& trial() const noexcept { return trial_; }

private:
    std::vector<double> reference_;
    std::vector<double> trial_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message)
{
    if (!condition)
        throw Error(code, message);
}

} // namespace lumen
