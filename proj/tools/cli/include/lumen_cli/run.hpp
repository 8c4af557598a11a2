#pragma once

// Subcommand dispatch shared by the `lumen` executable and the tests.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "lumen/error.hpp"

namespace lumen::cli {

inline constexpr const char* kReportSchema = "lumen-report/1";

struct Invocation
{
    std::string subcommand;
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> resolution;
    std::optional<double> tol;
    std::filesystem::path out_dir = ".";
    bool quiet = false;
    std::optional<double> max_distance; // optimal-delta --M
};

/// 2 for feasibility errors, 3 for convergence and floor errors, 1 otherwise.
int exit_code(ErrorCode code);

/// Runs one subcommand. Artifacts go under `out_dir`; a summary goes to `out`
/// unless quiet; failures print one `error: code=<name> message="..."` line to `err`.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

} // namespace lumen::cli
