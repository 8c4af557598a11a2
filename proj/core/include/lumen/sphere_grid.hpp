#pragma once

// Apertures on the unit sphere and their quadrature grids.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "lumen/vec3.hpp"

namespace lumen {

/// Result of testing a spherical cap against a domain.
enum class Coverage
{
    Inside,
    Outside,
    Straddles,
};

struct SphereDomain
{
};

struct CapDomain
{
    Vec3 center;
    double half_angle = 0.0; // radians, in (0, pi]
};

/// Convex geodesic polygon; vertices counter-clockwise seen from outside the sphere.
struct PolygonDomain
{
    std::vector<Vec3> vertices;
    std::vector<Vec3> edge_normals; // inward, one per edge
};

/// Aperture Omega on S^2: the whole sphere, a cap (hemispheres are caps of
/// half-angle pi/2), or a convex geodesic polygon.
class Domain
{
public:
    static Domain sphere();
    static Domain hemisphere(const Vec3& pole);
    static Domain cap(const Vec3& center, double half_angle);
    static Domain polygon(std::vector<Vec3> vertices);

    /// Closed-set membership with an absolute slack of `tol` on the defining
    /// inequalities.
    bool contains(const Vec3& x, double tol = 1e-12) const;

    /// Classify the cap of angular radius `radius` around the unit vector `center`.
    Coverage classify(const Vec3& center, double radius) const;

    /// Exact area in steradians.
    double area() const;

    /// A cap (center, half-angle) enclosing the domain, used for sampling.
    CapDomain bounding_cap() const;

    const std::variant<SphereDomain, CapDomain, PolygonDomain>& shape() const { return shape_; }

private:
    explicit Domain(std::variant<SphereDomain, CapDomain, PolygonDomain> shape)
        : shape_(std::move(shape))
    {
    }

    std::variant<SphereDomain, CapDomain, PolygonDomain> shape_;
};

/// Area of the geodesic triangle with unit vertices a, b, c.
double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Quadrature on an aperture. Nodes are vertices of a frequency-n subdivided
/// icosahedron that lie in the closed domain. Each subdivision triangle gives
/// one third of its spherical area to each corner; triangles cut by the
/// boundary are resampled recursively and the inside part is credited to the
/// nearest inside corner.
class SphericalGrid
{
public:
    /// Pick the subdivision frequency so that roughly `node_hint` nodes land
    /// inside the domain. Throws invalid-argument for an empty result.
    static SphericalGrid build(const Domain& domain, std::size_t node_hint);

    /// Explicit subdivision frequency; frequency 2n nests the nodes of n.
    static SphericalGrid with_frequency(const Domain& domain, int frequency);

    const Domain& domain() const { return domain_; }
    int frequency() const { return frequency_; }
    std::size_t size() const { return nodes_.size(); }
    std::span<const Vec3> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    /// Subdivision triangles whose three corners are nodes (mesh topology).
    std::span<const std::array<std::uint32_t, 3>> triangles() const { return triangles_; }
    /// Unique undirected edges of `triangles()`.
    std::vector<std::array<std::uint32_t, 2>> edges() const;

    /// Sum of the weights.
    double total_weight() const;
    /// Area of boundary slivers whose triangle had no corner inside the domain.
    double dropped_area() const { return dropped_area_; }

private:
    SphericalGrid(Domain domain) : domain_(std::move(domain)) {}

    Domain domain_;
    int frequency_ = 0;
    std::vector<Vec3> nodes_;
    std::vector<double> weights_;
    std::vector<std::array<std::uint32_t, 3>> triangles_;
    double dropped_area_ = 0.0;
};

/// sum_j w_j values_j with compensated summation in node order. Throws
/// numeric-error naming the first non-finite node.
double integrate(const SphericalGrid& grid, std::span<const double> values);

/// integrate() of a field evaluated at the nodes.
double integrate(const SphericalGrid& grid, const std::function<double(const Vec3&)>& field);

} // namespace lumen
