#pragma once

// Feasibility constants, the discrete near/far solvers, the refinement driver
// for planar densities, the optimal delta and visibility diagnostics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lumen/envelope.hpp"
#include "lumen/intensity.hpp"
#include "lumen/sphere_grid.hpp"
#include "lumen/target.hpp"

namespace lumen {

struct SolverConfig
{
    double delta = 15.0 / 8.0;
    double k = 5.0 / 3.0;     // near field: d_1 = k delta M
    double a = 1.0;           // far field: floors d_i >= 2a
    double a_prime = 8.0;     // far field: d_1 = a'
    double residual_tol = 1e-3;
    int max_sweeps = 5000;
    /// Bisection width on d, relative to M (near) or a' (far).
    double bisection_tol = 1e-9;
    /// Sweeps continue past residual_tol until no d moves by more than
    /// polish_tol (same units as bisection_tol). Brackets open one bisection
    /// width from the current d, so a settled coordinate does not move at all.
    double polish_tol = 1e-10;
    /// Extra sweeps allowed for polishing once residual_tol is met.
    int max_polish_sweeps = 200;
    /// Initial d_i = start_factor * (threshold that lets atom 1 win everywhere).
    double start_factor = 1.05;
    WeightModel weight = WeightModel::inverse_square();

    // Refinement driver.
    double eps0 = 0.0;       // initial cell diameter; 0 selects the patch diameter
    double uniform_tol = 0.0; // stop when sup |rho_{l+1} - rho_l| <= uniform_tol
    int max_levels = 3;      // deepest level solved
};

/// (1 - c)^3 / ((1 + c) (delta' M)^2), the lower bound on x.nu / rho^2 when d_1 <= delta' M.
double lower_bound_constant(double delta, double delta_prime, double max_distance);

/// C(delta, k delta, M). Throws invalid-argument for k below (1 + c)/(1 - c) or nonpositive inputs.
double feasibility_constant(double delta, double k, double max_distance);

/// delta^3 / (2 a'^2). Throws invalid-argument unless 0 < delta < 1 and a' > 0.
double feasibility_constant_far(double a_prime, double delta);

struct EnergyCheck
{
    bool feasible = false;
    double margin = 0.0;     // integral of f minus eta(D) / C
    double total_flux = 0.0; // integral of f
    double constant = 0.0;   // C for the configured weight
    double target_mass = 0.0;
};

/// Energy condition for the configured weight; C is the closed form for the
/// inverse-square law and min F over the admissible (x.nu, rho) box otherwise.
/// Feasible iff margin >= -1e-12 * integral of f.
EnergyCheck check_energy_condition(const SampledIntensity& f, const TargetMeasure& target,
                                   const SolverConfig& config);

struct SolveReport
{
    Reflector reflector;
    std::vector<double> targets;   // g_i, overshoot atom first
    MeasureVector measure;         // mu_i from a fresh envelope evaluation
    std::vector<double> residuals; // |mu_i - g_i| / g_i; 0 for the overshoot atom
    double max_residual = 0.0;
    double overshoot = 0.0;        // mu_1 - g_1
    int sweeps = 0;
    bool polished = false;         // polish_tol reached, not only residual_tol
    double tie_fraction = 0.0;
    double coverage = 0.0;         // fraction of nodes assigned to some atom
    double margin = 0.0;           // energy-condition margin
    std::vector<double> residual_trace; // max residual after each sweep
};

/// Coordinate-wise solver for a discrete target. The overshoot atom keeps
/// d_1 = k delta M (near) or a' (far); each other d_i is moved by bisection
/// until mu_i meets g_i from below.
class DiscreteSolver
{
public:
    /// Validates the configuration and, for the far field, x.m_i <= 1 - delta
    /// on every node. `initial` replaces the default start w_0 (warm start).
    DiscreteSolver(const SphericalGrid& grid, const SampledIntensity& f, const TargetMeasure& target,
                   const SolverConfig& config, std::optional<std::vector<double>> initial = std::nullopt);

    /// One bisection on atom i (i >= 1). Throws floor-error when mu_i stays
    /// below g_i (1 - residual_tol) at the floor.
    void adjust(std::size_t i);

    /// adjust() over `order` (index 0 skipped); returns max |change in d| in scale units.
    double sweep(std::span<const std::size_t> order);

    /// mu_i of the current iterate from the solver's node cache.
    std::vector<double> measures() const;
    const std::vector<double>& focal() const { return d_; }
    double floor() const { return floor_; }
    double scale() const { return scale_; }
    /// Bisection steps that failed the monotonicity check and used the golden-section fallback.
    std::size_t fallbacks() const { return fallbacks_; }

    /// Sweep until converged. An empty `order` means 1, 2, ..., N-1.
    SolveReport solve(std::span<const std::size_t> order = {});

private:
    double rho(std::size_t i, std::size_t j, double d, double eps) const
    {
        return d / (1.0 - eps * dots_[i * nodes_ + j]);
    }
    double eccentricity(std::size_t i, double d) const;
    void rebuild_node(std::size_t j);
    double atom_measure(std::size_t i, double d, std::span<const std::uint32_t> candidates,
                        std::span<const double> other_rho, std::span<const std::uint32_t> other_idx,
                        std::vector<std::uint32_t>* winners) const;
    std::vector<double> residuals(const std::vector<double>& mu) const;

    const SphericalGrid& grid_;
    const SampledIntensity& f_;
    const TargetMeasure& target_;
    SolverConfig config_;
    bool far_ = false;
    std::size_t atoms_ = 0;
    std::size_t nodes_ = 0;
    double scale_ = 1.0;
    double floor_ = 0.0;
    double margin_ = 0.0;
    std::vector<double> g_;
    std::vector<double> op_;
    std::vector<double> dots_; // x_j . m_i, atom-major
    std::vector<double> wf_;   // weight_j * f_j
    std::vector<double> d_;
    std::vector<double> eps_;
    // Best and second-best atom per node.
    std::vector<std::uint32_t> best_, second_;
    std::vector<double> best_rho_, second_rho_;
    std::size_t fallbacks_ = 0;
};

/// DiscreteSolver(grid, f, target, config).solve() after the energy check.
/// Throws feasibility-error when the energy condition fails.
SolveReport solve_discrete(const SphericalGrid& grid, const SampledIntensity& f, const TargetMeasure& target,
                           const SolverConfig& config);

struct GeneralLevel
{
    int level = 0;
    std::size_t cells = 0;
    double max_cell_diameter = 0.0;
    double cell_mass_total = 0.0;
    SolveReport report;
};

struct GeneralReport
{
    std::vector<GeneralLevel> levels;
    /// sup over nodes of |rho_{l+1} - rho_l|, one entry per consecutive pair.
    std::vector<double> sup_change;
    bool uniform_converged = false;
    CellPartition partition; // final level
    TargetMeasure target;    // atoms of the final level
};

/// Refinement driver for a planar density. Level l solves the cellization of
/// diameter <= eps0 / 2^l, warm-started from start_factor times the parent
/// cells' d (falling back to a cold start on convergence or floor errors). Errors from
/// a level are rethrown with the level index in the message.
GeneralReport solve_general(const SphericalGrid& grid, const SampledIntensity& f, const PlanarTarget& target,
                            const SolverConfig& config);

struct OptimalDelta
{
    double delta = 0.0;
    double c = 0.0;
    double k = 0.0;
    double constant = 0.0; // r(delta) / M^2
};

/// r(delta) = (1 - c)^5 / (delta^2 (1 + c)^3).
double delta_efficiency(double delta);

/// Maximizer of r(delta); located by bisection on the sign of r'(delta).
OptimalDelta optimal_delta(double max_distance);

struct VisibilityReport
{
    double delta_d = 0.0;
    bool shadow_clear = false;      // no aperture direction points at the target
    bool obstruction_clear = false; // delta > delta_D
};

/// (1 - q^2) / (2 q) with q = m / (M + diam).
double obstruction_threshold(double min_distance, double max_distance, double diameter);

VisibilityReport visibility_report(const TargetMeasure& target, const Domain& domain, double delta);
/// Shadow test by shooting a ray from every grid node at the patch.
VisibilityReport visibility_report(const PlanarTarget& target, const SphericalGrid& grid, double delta);

struct MinimalityResult
{
    std::size_t trials = 0;
    double max_focal_gap = 0.0;       // max |d_trial - d_ref| in scale units
    double min_overshoot_excess = 0.0; // min over trials of mu_1(trial) - mu_1(ref)
};

/// Re-solve with shuffled sweep orders and perturbed starts; every run must
/// reproduce the reference focal vector within 10 * bisection_tol (scale
/// units) and must not overshoot less than the reference by more than
/// residual_tol * g_1. Throws minimality-violation otherwise. Uniqueness, and
/// so this check, assumes a connected aperture; that is not verified.
MinimalityResult overshoot_minimality_check(const SphericalGrid& grid, const SampledIntensity& f,
                                            const TargetMeasure& target, const SolverConfig& config,
                                            const SolveReport& reference, std::size_t trials,
                                            std::uint64_t seed);

} // namespace lumen
