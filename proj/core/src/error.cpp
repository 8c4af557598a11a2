#include "lumen/error.hpp"

namespace lumen {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DegenerateDirection: return "degenerate-direction";
    case ErrorCode::ConstraintViolated: return "constraint-violated";
    case ErrorCode::NumericError: return "numeric-error";
    case ErrorCode::Feasibility: return "feasibility-error";
    case ErrorCode::Convergence: return "convergence-error";
    case ErrorCode::Floor: return "floor-error";
    case ErrorCode::MinimalityViolation: return "minimality-violation";
    case ErrorCode::Accounting: return "accounting-error";
    case ErrorCode::Config: return "config-error";
    case ErrorCode::Io: return "io-error";
    }
    return "unknown-error";
}

} // namespace lumen
