#pragma once

// Radiant intensity f(x) of the point source, in W/sr.

#include <functional>
#include <string>
#include <vector>

#include "lumen/sphere_grid.hpp"
#include "lumen/vec3.hpp"

namespace lumen {

class IntensityField
{
public:
    /// f == value. Throws invalid-argument for a negative or non-finite value.
    static IntensityField constant(double value);

    /// Axially symmetric profile: f is piecewise linear in the polar angle
    /// (radians) from `axis`, clamped to the end values outside the table.
    /// Angles must be strictly increasing and values nonnegative.
    static IntensityField profile(const Vec3& axis, std::vector<double> angles, std::vector<double> values);

    /// Arbitrary nonnegative field. `upper_bound` must dominate f on the
    /// aperture; it is used by the ray sampler.
    static IntensityField custom(std::function<double(const Vec3&)> fn, double upper_bound,
                                 std::string name = "custom");

    double operator()(const Vec3& x) const { return fn_(x); }
    double upper_bound() const { return upper_bound_; }
    const std::string& name() const { return name_; }

private:
    IntensityField(std::function<double(const Vec3&)> fn, double upper_bound, std::string name)
        : fn_(std::move(fn)), upper_bound_(upper_bound), name_(std::move(name))
    {
    }

    std::function<double(const Vec3&)> fn_;
    double upper_bound_ = 0.0;
    std::string name_;
};

/// f at the grid nodes with its quadrature total.
struct SampledIntensity
{
    std::vector<double> values;
    double total_flux = 0.0;
};

/// Throws numeric-error for a negative or non-finite sample.
SampledIntensity sample(const IntensityField& f, const SphericalGrid& grid);

} // namespace lumen
