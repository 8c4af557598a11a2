#pragma once

// Shared problem instances for the unit and acceptance suites.

#include <cmath>
#include <numbers>
#include <vector>

#include "lumen/solver.hpp"
#include "lumen/sphere_grid.hpp"
#include "lumen/target.hpp"

namespace lumen::test {

inline const Vec3 kUp{0.0, 0.0, 1.0};

/// Five coplanar atoms below a hemisphere aperture. Total mass 0.205 against
/// a feasibility limit of 108/3125 * 2 pi / M^2 = 0.217 at M ~ 1.
inline std::vector<Vec3> desk_locations()
{
    return {{0.05, 0.02, -0.8}, {0.6, 0.0, -0.8}, {-0.45, 0.35, -0.8}, {-0.1, -0.55, -0.8}, {0.2, 0.5, -0.8}};
}

inline std::vector<double> desk_masses() { return {0.02, 0.045, 0.05, 0.04, 0.05}; }

inline TargetMeasure desk_target() { return TargetMeasure::points(desk_locations(), desk_masses()); }

inline Domain desk_domain() { return Domain::hemisphere(kUp); }

/// Unit direction from polar and azimuth angles in degrees.
inline Vec3 direction_deg(double polar, double azimuth)
{
    const double p = polar * std::numbers::pi / 180.0, a = azimuth * std::numbers::pi / 180.0;
    return {std::sin(p) * std::cos(a), std::sin(p) * std::sin(a), std::cos(p)};
}

/// Four far-field directions at least 118 degrees from every direction of a
/// pi/4 cap around +z, so x.m <= 1/2 holds with room to spare.
inline std::vector<Vec3> far_directions()
{
    return {direction_deg(120, 10), direction_deg(125, 100), direction_deg(130, 200), direction_deg(118, 290)};
}

inline std::vector<double> far_masses(double scale = 1.15)
{
    std::vector<double> g{0.3e-3, 0.4e-3, 0.35e-3, 0.45e-3};
    for (double& x : g)
        x *= scale;
    return g;
}

inline Domain far_domain() { return Domain::cap(kUp, std::numbers::pi / 4.0); }

inline SolverConfig far_config()
{
    SolverConfig c;
    c.delta = 0.5;
    c.a = 1.0;
    c.a_prime = 8.0;
    return c;
}

/// Uniform density on a 0.2 x 0.2 patch in the source plane z = 0.
inline PlanarTarget patch_target(double density = 4.5)
{
    return PlanarTarget{PlanarPatch({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.5, 0.7, -0.1, 0.1}),
                        PlanarDensity::uniform(density), 0.537, 0.0213};
}

inline Domain patch_domain() { return Domain::cap(kUp, std::numbers::pi / 3.0); }

} // namespace lumen::test
