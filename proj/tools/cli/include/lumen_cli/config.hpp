#pragma once

// Job configuration: strict JSON ingestion into core types.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lumen/intensity.hpp"
#include "lumen/solver.hpp"
#include "lumen/sphere_grid.hpp"
#include "lumen/target.hpp"

namespace lumen::cli {

enum class Mode
{
    Near,
    Far,
};

struct AtomSpec
{
    std::vector<Vec3> locations; // points (near) or directions (far)
    std::vector<double> masses;
    std::size_t overshoot = 0;
};

struct ValidationToggles
{
    bool raytrace = true;
    std::size_t rays = 1'000'000;
    bool conservation = true;
    bool transport = true;
    std::size_t transport_samples = 1000;
    bool obstruction = true;
    std::size_t obstruction_samples = 10'000;
    bool minimality = false;
    std::size_t minimality_trials = 5;
};

struct Outputs
{
    std::string report = "report.json";
    std::string csv = "atoms.csv";
    std::string mesh; // empty: no mesh unless export-mesh
    ValidationToggles validation;
};

struct JobConfig
{
    Mode mode = Mode::Near;
    Domain domain = Domain::sphere();
    IntensityField intensity = IntensityField::constant(1.0);
    std::optional<AtomSpec> atoms;
    std::optional<PlanarTarget> planar;
    SolverConfig solver;
    bool auto_delta = false;
    bool auto_k = false;
    std::size_t resolution = 20'000;
    std::uint64_t seed = 1;
    Outputs outputs;
    /// Parsed input with defaults filled in; "auto" entries are replaced once resolved.
    nlohmann::ordered_json echo;
};

/// Parses a config document. Unknown keys anywhere raise config-error
/// listing every offending key path.
JobConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads and parses a file; io-error when it cannot be read, config-error on malformed JSON.
JobConfig load_config(const std::filesystem::path& path);

/// Rewrites the solver and outputs sections of `echo` from the parsed values.
void refresh_echo(JobConfig& job);

/// Target measure of an atom spec in the configured mode.
TargetMeasure atom_target(const JobConfig& job);

/// Replaces "auto" delta/k. Near field only: delta comes from optimal_delta(M)
/// and must exceed the obstruction threshold; k defaults to (1 + c)/(1 - c).
void resolve_auto(JobConfig& job);

} // namespace lumen::cli
