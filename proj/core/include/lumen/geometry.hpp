#pragma once

// Closed-form geometry of ellipsoids and paraboloids of revolution that have
// one focus at the origin (the point source).
//
// An ellipsoid is stored by its far focus P, the focal parameter d (the radius
// of the circle cut by the plane through the origin perpendicular to OP) and
// the eccentricity. Its polar radius is d / (1 - eps x.m) with m = P/|P|.
// A paraboloid is the eps -> 1 limit with the far focus at infinity along m.

#include "lumen/vec3.hpp"

namespace lumen {

/// eps = sqrt(1 + (d/OP)^2) - d/OP. Throws invalid-argument unless d, OP > 0.
double eccentricity_from_focal(double focal_param, double focal_distance);

/// d = OP (1 - eps^2) / (2 eps). Throws invalid-argument unless 0 < eps < 1.
double focal_from_eccentricity(double eccentricity, double focal_distance);

/// Eccentricity ceiling for the class d >= delta * OP: c = -delta + sqrt(1 + delta^2).
/// Throws invalid-argument for delta <= 0.
double c_delta(double delta);

/// delta together with its eccentricity ceiling and the derived ratios.
struct DeltaBound
{
    double delta = 0.0;
    double c = 0.0;

    static DeltaBound from_delta(double delta);

    /// (1 + c) / (1 - c): Harnack ratio and the threshold on k.
    double ratio() const { return (1.0 + c) / (1.0 - c); }
    /// (1 - c) / (1 + c): lower bound for x.nu on any supporting ellipsoid.
    double min_cosine() const { return (1.0 - c) / (1.0 + c); }
};

class Ellipsoid
{
public:
    /// Supporting ellipsoid E_d(P). Throws invalid-argument for d <= 0 or P = 0.
    static Ellipsoid from_focal(const Vec3& far_focus, double focal_param);
    /// Ellipsoid with foci O and P and the given eccentricity in (0, 1).
    static Ellipsoid from_eccentricity(const Vec3& far_focus, double eccentricity);

    const Vec3& far_focus() const { return far_focus_; }
    const Vec3& axis() const { return axis_; }
    double focal_param() const { return focal_param_; }
    double eccentricity() const { return eccentricity_; }
    double focal_distance() const { return focal_distance_; }
    /// c in |X| + |X - P| = c.
    double major_sum() const { return focal_distance_ / eccentricity_; }

    /// rho(x) = d / (1 - eps x.m) for a unit direction x.
    double radius(const Vec3& x) const
    {
        return focal_param_ / (1.0 - eccentricity_ * dot(x, axis_));
    }

    /// Outer unit normal (x - eps m) / |x - eps m| at rho(x) x.
    Vec3 normal(const Vec3& x) const { return normalized(x - eccentricity_ * axis_); }

    /// x.nu(x) = (1 - eps x.m) / |x - eps m|, without forming nu.
    double cosine(const Vec3& x) const
    {
        return (1.0 - eccentricity_ * dot(x, axis_)) / norm(x - eccentricity_ * axis_);
    }

private:
    Ellipsoid(const Vec3& far_focus, double focal_param, double eccentricity);

    Vec3 far_focus_;
    Vec3 axis_;
    double focal_param_ = 0.0;
    double eccentricity_ = 0.0;
    double focal_distance_ = 0.0;
};

class Paraboloid
{
public:
    /// P_d(m). `axis` is normalized; throws invalid-argument for d <= 0 or a zero axis.
    Paraboloid(const Vec3& axis, double focal_param);

    const Vec3& axis() const { return axis_; }
    double focal_param() const { return focal_param_; }

    /// rho(x) = d / (1 - x.m). Throws degenerate-direction when x.m is 1 to
    /// machine tolerance.
    double radius(const Vec3& x) const;

    /// rho(x) without the degeneracy check; callers guarantee x.m <= 1 - delta.
    double radius_unchecked(const Vec3& x) const { return focal_param_ / (1.0 - dot(x, axis_)); }

    /// (x - m) / |x - m|. Throws degenerate-direction for x = m.
    Vec3 normal(const Vec3& x) const;

    /// x.nu(x) = |x - m| / 2 for unit x.
    double cosine(const Vec3& x) const { return 0.5 * norm(x - axis_); }

private:
    Vec3 axis_;
    double focal_param_ = 0.0;
};

/// Specular reflection Y = X - 2 (X.nu) nu.
inline Vec3 reflect_direction(const Vec3& incident, const Vec3& normal)
{
    return incident - 2.0 * dot(incident, normal) * normal;
}

/// Distance from `point` to the ray {origin + t dir : t >= 0}; `dir` is unit.
double ray_point_distance(const Vec3& origin, const Vec3& dir, const Vec3& point);

/// Distance from the far focus to the ray reflected at rho(x) x. Zero in exact
/// arithmetic for every direction.
double verify_focus_property(const Ellipsoid& e, const Vec3& x);

struct RadiusBounds
{
    double lower = 0.0;
    double upper = 0.0;
};

/// (d / (1 + c_delta), d / (1 - c_delta)). Throws constraint-violated unless
/// d >= delta * OP (up to 1e-12 relative).
RadiusBounds radius_bounds(const Ellipsoid& e, double delta);

/// (d / 2, d / delta) on any domain with x.m <= 1 - delta. Throws
/// constraint-violated unless 0 < delta < 1.
RadiusBounds radius_bounds(const Paraboloid& p, double delta);

} // namespace lumen
