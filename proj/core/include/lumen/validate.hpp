#pragma once

// Independent checks of synthesized reflectors: Monte Carlo ray tracing, the
// transport-map determinant inequality, the constant-weight comparison and
// obstruction of reflected rays.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "lumen/envelope.hpp"
#include "lumen/intensity.hpp"
#include "lumen/solver.hpp"
#include "lumen/sphere_grid.hpp"
#include "lumen/target.hpp"

namespace lumen {

struct RayTraceResult
{
    std::vector<double> totals;         // estimates of mu_i
    std::vector<double> standard_error; // per atom
    std::vector<double> focus_miss;     // max distance of a winning ray to its focus (near) or 1 - Y.m (far)
    double traced_flux = 0.0;           // estimate of the integral of f F over the aperture
    std::size_t rays = 0;               // proposals drawn
    std::size_t accepted = 0;           // proposals inside the aperture and kept by rejection on f
    std::size_t unmatched = 0;          // accepted rays whose reflection matched no atom
};

struct RayTraceOptions
{
    std::size_t rays = 1'000'000;
    std::uint64_t seed = 1;
    /// Near field: a ray matches atom i when it passes within match_tol * M of P_i.
    double match_tol = 1e-6;
    /// Far field: a ray matches atom i when Y.m_i >= 1 - direction_tol.
    double direction_tol = 1e-12;
    /// accounting-error is raised when unmatched / accepted exceeds this.
    double max_unmatched_fraction = 1e-3;
};

/// Directions are proposed uniformly on the aperture's bounding cap and kept
/// with probability f / sup f, so kept rays are distributed like f on the
/// aperture. Each kept ray contributes F(x.nu, rho) scaled by cap area * sup f
/// to the atom it reaches. Random numbers come from a counter-based stream
/// keyed by (seed, ray index).
RayTraceResult raytrace(const Reflector& r, const Domain& domain, const IntensityField& f, const WeightModel& F,
                        double max_distance, const RayTraceOptions& options = {});

struct TransportCheck
{
    std::size_t requested = 0;
    std::size_t evaluated = 0;
    std::size_t skipped_tie = 0;     // winner changes or ties within 3h
    std::size_t skipped_invalid = 0; // outside the aperture or reflected ray misses the plane
    std::size_t violations = 0;
    double max_violation = 0.0;      // max (LHS - RHS) / RHS over evaluated samples, floored at 0
    double max_rel_residual = 0.0;   // max |LHS - RHS| / RHS
    double h = 0.0;
};

struct TransportOptions
{
    std::size_t samples = 1000;
    std::uint64_t seed = 7;
    double h = 1e-4;
    /// Inequality tolerance is tolerance_scale * h, relative to the right-hand side.
    double tolerance_scale = 1.0;
};

/// Checks |det DT| <= f (X.nu) / (sqrt(1 - |x|^2) rho^2 g(T(x))) on the chart
/// x = (X_1, X_2) of the upper hemisphere. T(x) is the patch coordinate of
/// the point where the reflected ray meets the target plane; DT is formed by
/// central differences of step h.
TransportCheck transport_residual(const Reflector& r, const Domain& domain, const IntensityField& f,
                                  const PlanarPatch& patch, const std::function<double(double, double)>& g,
                                  const TransportOptions& options = {});

TransportCheck transport_residual(const Reflector& r, const Domain& domain, const IntensityField& f,
                                  const PlanarTarget& target, const TransportOptions& options = {});

struct ConstantWeightComparison
{
    double factor = 0.0;     // ((1 + c)/(1 - c))^5 - 1
    double bound = 0.0;      // factor * eta(D)
    double eta_e = 0.0;      // eta(D \ {P_1})
    double mu_star_e = 0.0;  // inverse-square measure of D \ {P_1} for the constant-weight reflector
    double gap = 0.0;        // mu_star_e - eta_e
    std::vector<double> mu_star; // per atom
    SolveReport constant_solve;
};

/// Solves the constant-weight problem with targets g_i / C(delta, k delta, M)
/// and k = (1 + c)/(1 - c), then evaluates the inverse-square measure of the
/// resulting reflector. Throws invalid-argument unless the integral of f
/// equals eta(D) / C to 1e-6 relative.
ConstantWeightComparison compare_constant_weight(const SphericalGrid& grid, const SampledIntensity& f,
                                                 const TargetMeasure& target, const SolverConfig& config);

struct ObstructionResult
{
    std::size_t samples = 0;
    std::size_t violations = 0;
    double max_excess = 0.0; // max relative amount by which a segment point leaves the body
};

/// Walks the segment from each reflection point to its focus and counts
/// samples where the segment leaves the body {|y| <= rho(y/|y|)} in a
/// direction of the aperture. Near-field reflectors only.
ObstructionResult obstruction_raycheck(const Reflector& r, const Domain& domain, std::size_t samples,
                                       std::uint64_t seed, std::size_t steps = 256);

/// Uniform variate in [0, 1) for (seed, counter); splitmix64 finalizer.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Direction uniformly distributed on the cap, from two uniforms.
Vec3 sample_cap(const CapDomain& cap, double u1, double u2);

} // namespace lumen
