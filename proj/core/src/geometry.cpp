#include "lumen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lumen/error.hpp"

namespace lumen {

double eccentricity_from_focal(double focal_param, double focal_distance)
{
    require(focal_param > 0.0 && focal_distance > 0.0, ErrorCode::InvalidArgument,
            "eccentricity_from_focal: d and OP must be positive");
    const double ratio = focal_param / focal_distance;
    // sqrt(1 + r^2) - r, rewritten to avoid cancellation for large r.
    return 1.0 / (std::hypot(1.0, ratio) + ratio);
}

double focal_from_eccentricity(double eccentricity, double focal_distance)
{
    require(eccentricity > 0.0 && eccentricity < 1.0, ErrorCode::InvalidArgument,
            "focal_from_eccentricity: eccentricity must lie in (0, 1)");
    require(focal_distance > 0.0, ErrorCode::InvalidArgument,
            "focal_from_eccentricity: OP must be positive");
    return focal_distance * (1.0 - eccentricity) * (1.0 + eccentricity) / (2.0 * eccentricity);
}

double c_delta(double delta)
{
    require(delta > 0.0, ErrorCode::InvalidArgument, "c_delta: delta must be positive");
    return 1.0 / (std::hypot(1.0, delta) + delta);
}

DeltaBound DeltaBound::from_delta(double delta)
{
    return DeltaBound{delta, c_delta(delta)};
}

Ellipsoid::Ellipsoid(const Vec3& far_focus, double focal_param, double eccentricity)
    : far_focus_(far_focus), axis_(normalized(far_focus)), focal_param_(focal_param),
      eccentricity_(eccentricity), focal_distance_(norm(far_focus))
{
}

Ellipsoid Ellipsoid::from_focal(const Vec3& far_focus, double focal_param)
{
    const double op = norm(far_focus);
    require(op > 0.0, ErrorCode::InvalidArgument, "ellipsoid: far focus coincides with the source");
    return Ellipsoid(far_focus, focal_param, eccentricity_from_focal(focal_param, op));
}

Ellipsoid Ellipsoid::from_eccentricity(const Vec3& far_focus, double eccentricity)
{
    const double op = norm(far_focus);
    require(op > 0.0, ErrorCode::InvalidArgument, "ellipsoid: far focus coincides with the source");
    return Ellipsoid(far_focus, focal_from_eccentricity(eccentricity, op), eccentricity);
}

Paraboloid::Paraboloid(const Vec3& axis, double focal_param)
    : focal_param_(focal_param)
{
    require(focal_param > 0.0, ErrorCode::InvalidArgument, "paraboloid: d must be positive");
    const double n = norm(axis);
    require(n > 0.0, ErrorCode::InvalidArgument, "paraboloid: zero axis");
    axis_ = axis / n;
}

namespace {
constexpr double kDegenerateTol = 64.0 * std::numeric_limits<double>::epsilon();
}

double Paraboloid::radius(const Vec3& x) const
{
    const double gap = 1.0 - dot(x, axis_);
    if (gap <= kDegenerateTol)
        fail(ErrorCode::DegenerateDirection, "paraboloid radius: direction coincides with the axis");
    return focal_param_ / gap;
}

Vec3 Paraboloid::normal(const Vec3& x) const
{
    const Vec3 diff = x - axis_;
    const double n = norm(diff);
    if (n <= kDegenerateTol)
        fail(ErrorCode::DegenerateDirection, "paraboloid normal: direction coincides with the axis");
    return diff / n;
}

double ray_point_distance(const Vec3& origin, const Vec3& dir, const Vec3& point)
{
    const Vec3 rel = point - origin;
    const double t = std::max(0.0, dot(rel, dir));
    return norm(rel - t * dir);
}

double verify_focus_property(const Ellipsoid& e, const Vec3& x)
{
    const Vec3 hit = e.radius(x) * x;
    const Vec3 out = reflect_direction(x, e.normal(x));
    return ray_point_distance(hit, out, e.far_focus());
}

RadiusBounds radius_bounds(const Ellipsoid& e, double delta)
{
    const double floor = delta * e.focal_distance();
    if (!(e.focal_param() >= floor * (1.0 - 1e-12)))
        fail(ErrorCode::ConstraintViolated,
             "radius_bounds: focal parameter below delta * OP (d = " + std::to_string(e.focal_param()) +
                 ", delta * OP = " + std::to_string(floor) + ")");
    const double c = c_delta(delta);
    return {e.focal_param() / (1.0 + c), e.focal_param() / (1.0 - c)};
}

RadiusBounds radius_bounds(const Paraboloid& p, double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        fail(ErrorCode::ConstraintViolated, "radius_bounds: far-field delta must lie in (0, 1)");
    return {0.5 * p.focal_param(), p.focal_param() / delta};
}

} // namespace lumen
