#pragma once

// Reflectors as pointwise minima of supporting quadrics, their tracing
// regions on a grid, and the reflector measure.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lumen/intensity.hpp"
#include "lumen/sphere_grid.hpp"
#include "lumen/vec3.hpp"

namespace lumen {

enum class ReflectorKind
{
    Near, // ellipsoids E_{d_i}(P_i)
    Far,  // paraboloids P_{d_i}(m_i)
};

/// Relative gap below which the two best radii count as a tie.
inline constexpr double kTieTolerance = 1e-9;

struct EnvelopePoint
{
    double rho = 0.0;
    std::size_t winner = 0; // least index attaining the minimum
    bool tie = false;
};

/// rho_w(x) = min_i d_i / (1 - eps_i x.m_i), with eps_i = 1 for paraboloids.
class Reflector
{
public:
    /// Throws invalid-argument on size mismatch, nonpositive d or a focus at the origin.
    static Reflector near(const std::vector<Vec3>& foci, const std::vector<double>& focal_params);
    static Reflector far(const std::vector<Vec3>& axes, const std::vector<double>& focal_params);

    ReflectorKind kind() const { return kind_; }
    std::size_t size() const { return d_.size(); }
    const std::vector<double>& focal_params() const { return d_; }
    /// Far focus P_i (near) or unit direction m_i (far).
    const Vec3& target(std::size_t i) const { return target_[i]; }
    const Vec3& axis(std::size_t i) const { return axis_[i]; }
    double eccentricity(std::size_t i) const { return eps_[i]; }

    double atom_radius(std::size_t i, const Vec3& x) const
    {
        return d_[i] / (1.0 - eps_[i] * dot(x, axis_[i]));
    }
    Vec3 atom_normal(std::size_t i, const Vec3& x) const { return normalized(x - eps_[i] * axis_[i]); }
    /// x.nu for atom i's quadric.
    double atom_cosine(std::size_t i, const Vec3& x) const
    {
        return (1.0 - eps_[i] * dot(x, axis_[i])) / norm(x - eps_[i] * axis_[i]);
    }

    EnvelopePoint radius(const Vec3& x) const;
    /// Normal of the winning quadric at rho(x) x.
    Vec3 normal_at(const Vec3& x) const { return atom_normal(radius(x).winner, x); }

    /// Same targets with new focal parameters.
    Reflector with_focal(const std::vector<double>& focal_params) const;

private:
    ReflectorKind kind_ = ReflectorKind::Near;
    std::vector<Vec3> target_;
    std::vector<Vec3> axis_;
    std::vector<double> eps_;
    std::vector<double> d_;
};

struct RegionAssignment
{
    std::vector<std::uint32_t> winner;
    std::vector<char> tie;
    double tie_fraction = 0.0;
    std::vector<std::size_t> counts; // nodes per atom
};

RegionAssignment assign_regions(const Reflector& r, const SphericalGrid& grid);

/// F(u, v) with u = x.nu and v = rho.
class WeightModel
{
public:
    static WeightModel inverse_square();
    static WeightModel constant();
    static WeightModel custom(std::function<double(double, double)> fn, std::string name);

    double operator()(double u, double v) const
    {
        switch (kind_) {
        case Kind::InverseSquare:
            return u / (v * v);
        case Kind::Constant:
            return 1.0;
        case Kind::Custom:
            break;
        }
        return fn_(u, v);
    }

    const std::string& name() const { return name_; }
    bool is_inverse_square() const { return kind_ == Kind::InverseSquare; }

    /// Minimum of F over [u_lo, u_hi] x [v_lo, v_hi]: closed form for the
    /// presets, a 64 x 64 sample for custom weights.
    double min_over(double u_lo, double u_hi, double v_lo, double v_hi) const;

    /// Throws invalid-argument unless F is finite and positive on the box
    /// (closed form for presets, 64 x 64 sample for custom weights).
    void validate_on(double u_lo, double u_hi, double v_lo, double v_hi) const;

private:
    enum class Kind
    {
        InverseSquare,
        Constant,
        Custom,
    };
    Kind kind_ = Kind::InverseSquare;
    std::function<double(double, double)> fn_;
    std::string name_;
};

struct MeasureVector
{
    std::vector<double> per_atom;
    double total = 0.0;
};

/// mu_i = sum over nodes won by i of weight * f * F(x.nu, rho). Per-node terms
/// are formed in parallel and reduced in node order. Throws numeric-error
/// naming the first node with a non-finite term.
MeasureVector reflector_measure(const Reflector& r, const SphericalGrid& grid, const SampledIntensity& f,
                                const WeightModel& F);

/// integrate(grid, f * F(x.nu, rho)) evaluated without region bookkeeping.
double weighted_flux(const Reflector& r, const SphericalGrid& grid, const SampledIntensity& f,
                     const WeightModel& F);

struct RegularityReport
{
    double lipschitz_est = 0.0; // max |d rho| / |d x| over grid edges (chord length)
    double harnack_ratio = 0.0; // max rho / min rho
    double min_rho = 0.0;
    double max_rho = 0.0;
};

RegularityReport regularity_report(const Reflector& r, const SphericalGrid& grid);

/// (M/2) (1 + c) / (1 - c): Lipschitz bound for class A(delta).
double lipschitz_bound(double delta, double max_distance);
/// (1 + c) / (1 - c): Harnack bound for class A(delta).
double harnack_bound(double delta);

} // namespace lumen
