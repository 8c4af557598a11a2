#include "lumen/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lumen/error.hpp"

namespace lumen {

IntensityField IntensityField::constant(double value)
{
    require(std::isfinite(value) && value >= 0.0, ErrorCode::InvalidArgument,
            "intensity: constant value must be finite and nonnegative");
    return IntensityField([value](const Vec3&) { return value; }, value, "constant");
}

IntensityField IntensityField::profile(const Vec3& axis, std::vector<double> angles, std::vector<double> values)
{
    require(norm(axis) > 0.0, ErrorCode::InvalidArgument, "intensity profile: zero axis");
    require(!angles.empty() && angles.size() == values.size(), ErrorCode::InvalidArgument,
            "intensity profile: angle and value tables must be nonempty and of equal length");
    for (std::size_t i = 0; i < angles.size(); ++i) {
        require(std::isfinite(angles[i]) && std::isfinite(values[i]) && values[i] >= 0.0,
                ErrorCode::InvalidArgument, "intensity profile: entries must be finite, values nonnegative");
        if (i > 0)
            require(angles[i] > angles[i - 1], ErrorCode::InvalidArgument,
                    "intensity profile: angles must be strictly increasing");
    }
    const Vec3 m = normalized(axis);
    const double peak = *std::max_element(values.begin(), values.end());
    auto fn = [m, angles = std::move(angles), values = std::move(values)](const Vec3& x) {
        const double theta = angle_between(x, m);
        if (theta <= angles.front())
            return values.front();
        if (theta >= angles.back())
            return values.back();
        const auto hi = static_cast<std::size_t>(std::upper_bound(angles.begin(), angles.end(), theta) -
                                                 angles.begin());
        const std::size_t lo = hi - 1;
        const double t = (theta - angles[lo]) / (angles[hi] - angles[lo]);
        return values[lo] + t * (values[hi] - values[lo]);
    };
    return IntensityField(std::move(fn), peak, "profile");
}

IntensityField IntensityField::custom(std::function<double(const Vec3&)> fn, double upper_bound, std::string name)
{
    require(static_cast<bool>(fn), ErrorCode::InvalidArgument, "intensity: empty function");
    require(std::isfinite(upper_bound) && upper_bound > 0.0, ErrorCode::InvalidArgument,
            "intensity: upper bound must be positive and finite");
    return IntensityField(std::move(fn), upper_bound, std::move(name));
}

SampledIntensity sample(const IntensityField& f, const SphericalGrid& grid)
{
    SampledIntensity out;
    const auto nodes = grid.nodes();
    out.values.resize(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double v = f(nodes[j]);
        if (!std::isfinite(v) || v < 0.0)
            throw NumericError("intensity: invalid value at node " + std::to_string(j), j);
        out.values[j] = v;
    }
    out.total_flux = integrate(grid, out.values);
    return out;
}

} // namespace lumen
