#include "lumen/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "lumen/error.hpp"
#include "lumen/summation.hpp"

namespace lumen {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

} // namespace

Domain Domain::sphere() { return Domain(SphereDomain{}); }

Domain Domain::hemisphere(const Vec3& pole) { return cap(pole, kPi / 2.0); }

Domain Domain::cap(const Vec3& center, double half_angle)
{
    require(norm(center) > 0.0, ErrorCode::InvalidArgument, "cap domain: zero center");
    require(half_angle > 0.0 && half_angle <= kPi, ErrorCode::InvalidArgument,
            "cap domain: half-angle must lie in (0, pi]");
    return Domain(CapDomain{normalized(center), half_angle});
}

Domain Domain::polygon(std::vector<Vec3> vertices)
{
    require(vertices.size() >= 3, ErrorCode::InvalidArgument,
            "polygon domain: at least three vertices required");
    PolygonDomain poly;
    for (const Vec3& v : vertices) {
        require(norm(v) > 0.0, ErrorCode::InvalidArgument, "polygon domain: zero vertex");
        poly.vertices.push_back(normalized(v));
    }
    const std::size_t n = poly.vertices.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3 nrm = cross(poly.vertices[k], poly.vertices[(k + 1) % n]);
        require(norm(nrm) > 1e-14, ErrorCode::InvalidArgument,
                "polygon domain: repeated or antipodal consecutive vertices");
        poly.edge_normals.push_back(normalized(nrm));
    }
    // Convex and counter-clockwise: every vertex is on the inner side of every edge.
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            require(dot(poly.edge_normals[k], poly.vertices[j]) >= -1e-12, ErrorCode::InvalidArgument,
                    "polygon domain: vertices must form a convex counter-clockwise polygon");
    return Domain(std::move(poly));
}

bool Domain::contains(const Vec3& x, double tol) const
{
    return std::visit(overloaded{
                          [](const SphereDomain&) { return true; },
                          [&](const CapDomain& c) {
                              return dot(x, c.center) >= std::cos(c.half_angle) - tol;
                          },
                          [&](const PolygonDomain& p) {
                              for (const Vec3& nrm : p.edge_normals)
                                  if (dot(nrm, x) < -tol)
                                      return false;
                              return true;
                          },
                      },
                      shape_);
}

Coverage Domain::classify(const Vec3& center, double radius) const
{
    return std::visit(overloaded{
                          [](const SphereDomain&) { return Coverage::Inside; },
                          [&](const CapDomain& c) {
                              const double beta = angle_between(center, c.center);
                              if (beta + radius <= c.half_angle)
                                  return Coverage::Inside;
                              if (beta - radius >= c.half_angle)
                                  return Coverage::Outside;
                              return Coverage::Straddles;
                          },
                          [&](const PolygonDomain& p) {
                              bool inside = true;
                              for (const Vec3& nrm : p.edge_normals) {
                                  const double s = std::asin(clamp_unit(dot(nrm, center)));
                                  if (s <= -radius)
                                      return Coverage::Outside;
                                  if (s < radius)
                                      inside = false;
                              }
                              return inside ? Coverage::Inside : Coverage::Straddles;
                          },
                      },
                      shape_);
}

double Domain::area() const
{
    return std::visit(overloaded{
                          [](const SphereDomain&) { return 4.0 * kPi; },
                          [](const CapDomain& c) { return 2.0 * kPi * (1.0 - std::cos(c.half_angle)); },
                          [](const PolygonDomain& p) {
                              double a = 0.0;
                              for (std::size_t k = 1; k + 1 < p.vertices.size(); ++k)
                                  a += spherical_triangle_area(p.vertices[0], p.vertices[k],
                                                               p.vertices[k + 1]);
                              return a;
                          },
                      },
                      shape_);
}

CapDomain Domain::bounding_cap() const
{
    return std::visit(overloaded{
                          [](const SphereDomain&) { return CapDomain{{0.0, 0.0, 1.0}, kPi}; },
                          [](const CapDomain& c) { return c; },
                          [](const PolygonDomain& p) {
                              Vec3 sum;
                              for (const Vec3& v : p.vertices)
                                  sum += v;
                              const Vec3 c = normalized(sum);
                              double r = 0.0;
                              for (const Vec3& v : p.vertices)
                                  r = std::max(r, angle_between(c, v));
                              return CapDomain{c, r};
                          },
                      },
                      shape_);
}

double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c)
{
    // Van Oosterom & Strackee solid-angle formula.
    const double numer = std::abs(dot(a, cross(b, c)));
    const double denom = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    return 2.0 * std::atan2(numer, denom);
}

namespace {

struct Icosahedron
{
    std::array<Vec3, 12> vertices;
    std::array<std::array<int, 3>, 20> faces;
};

Icosahedron make_icosahedron()
{
    const double phi = std::numbers::phi;
    Icosahedron ico{};
    const std::array<Vec3, 12> raw = {{
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    }};
    for (std::size_t i = 0; i < raw.size(); ++i)
        ico.vertices[i] = normalized(raw[i]);
    ico.faces = {{
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    }};
    return ico;
}

// Barycentric key identifying a lattice point shared between faces:
// sorted (icosahedron vertex, weight) pairs with zero weights removed.
using LatticeKey = std::array<int, 6>;

LatticeKey lattice_key(const std::array<int, 3>& face, int i, int j, int k)
{
    std::array<std::pair<int, int>, 3> parts = {{{face[0], i}, {face[1], j}, {face[2], k}}};
    std::sort(parts.begin(), parts.end());
    LatticeKey key{-1, -1, -1, -1, -1, -1};
    int slot = 0;
    for (const auto& [v, w] : parts) {
        if (w == 0)
            continue;
        key[slot++] = v;
        key[slot++] = w;
    }
    return key;
}

double cap_radius(const Vec3& center, const Vec3& a, const Vec3& b, const Vec3& c)
{
    return std::max({angle_between(center, a), angle_between(center, b), angle_between(center, c)});
}

// Signed boundary function: nonnegative exactly on the domain.
double level(const Domain& domain, const Vec3& x)
{
    return std::visit(overloaded{
                          [](const SphereDomain&) { return 1.0; },
                          [&](const CapDomain& c) { return dot(x, c.center) - std::cos(c.half_angle); },
                          [&](const PolygonDomain& p) {
                              double m = INFINITY;
                              for (const Vec3& nrm : p.edge_normals)
                                  m = std::min(m, dot(nrm, x));
                              return m;
                          },
                      },
                      domain.shape());
}

// Fraction of a triangle where the linear interpolant of corner values is nonnegative.
double inside_fraction(double p, double q, double r)
{
    const int positive = (p >= 0.0) + (q >= 0.0) + (r >= 0.0);
    if (positive == 3)
        return 1.0;
    if (positive == 0)
        return 0.0;
    // Rotate so that p is the corner on its own side of the cut.
    if ((q >= 0.0) != (p >= 0.0) && (q >= 0.0) != (r >= 0.0))
        std::swap(p, q);
    else if ((r >= 0.0) != (p >= 0.0) && (r >= 0.0) != (q >= 0.0))
        std::swap(p, r);
    const double lone = p * p / ((p - q) * (p - r));
    return p >= 0.0 ? lone : 1.0 - lone;
}

struct Clipper
{
    const Domain& domain;
    int max_depth;

    // Inside area of the geodesic triangle (a, b, c); leaves at max_depth are
    // cut linearly between the boundary values at their corners. `credit`
    // receives (leaf centroid, area).
    template <class Credit>
    void clip(const Vec3& a, const Vec3& b, const Vec3& c, int depth, Credit&& credit) const
    {
        const Vec3 center = normalized(a + b + c);
        const Coverage cov = domain.classify(center, cap_radius(center, a, b, c));
        if (cov == Coverage::Outside)
            return;
        if (cov == Coverage::Inside) {
            credit(center, spherical_triangle_area(a, b, c));
            return;
        }
        if (depth >= max_depth) {
            const double frac = inside_fraction(level(domain, a), level(domain, b), level(domain, c));
            if (frac > 0.0)
                credit(center, frac * spherical_triangle_area(a, b, c));
            return;
        }
        const Vec3 ab = normalized(a + b);
        const Vec3 bc = normalized(b + c);
        const Vec3 ca = normalized(c + a);
        clip(a, ab, ca, depth + 1, credit);
        clip(ab, b, bc, depth + 1, credit);
        clip(ca, bc, c, depth + 1, credit);
        clip(ab, bc, ca, depth + 1, credit);
    }
};

} // namespace

SphericalGrid SphericalGrid::with_frequency(const Domain& domain, int frequency)
{
    require(frequency >= 1, ErrorCode::InvalidArgument, "grid: frequency must be at least 1");
    const Icosahedron ico = make_icosahedron();
    const int n = frequency;

    // Lattice vertices in first-appearance order.
    std::map<LatticeKey, std::uint32_t> index_of;
    std::vector<Vec3> positions;
    auto vertex = [&](const std::array<int, 3>& face, int i, int j) -> std::uint32_t {
        const int k = n - i - j;
        const LatticeKey key = lattice_key(face, i, j, k);
        auto [it, inserted] = index_of.try_emplace(key, static_cast<std::uint32_t>(positions.size()));
        if (inserted) {
            const Vec3 p = (static_cast<double>(i) * ico.vertices[face[0]] +
                            static_cast<double>(j) * ico.vertices[face[1]] +
                            static_cast<double>(k) * ico.vertices[face[2]]) /
                           static_cast<double>(n);
            positions.push_back(normalized(p));
        }
        return it->second;
    };

    std::vector<std::array<std::uint32_t, 3>> all_triangles;
    all_triangles.reserve(20 * static_cast<std::size_t>(n) * n);
    for (const auto& face : ico.faces) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; i + j < n; ++j) {
                all_triangles.push_back({vertex(face, i, j), vertex(face, i + 1, j), vertex(face, i, j + 1)});
                if (i + j + 2 <= n)
                    all_triangles.push_back(
                        {vertex(face, i + 1, j), vertex(face, i + 1, j + 1), vertex(face, i, j + 1)});
            }
        }
    }

    // Boundary resampling depth grows with frequency so the clipping error
    // falls faster than the node spacing.
    const int depth = std::clamp(static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 2, 3, 10);
    const Clipper clipper{domain, depth};

    std::vector<char> inside(positions.size());
    for (std::size_t v = 0; v < positions.size(); ++v)
        inside[v] = domain.contains(positions[v]) ? 1 : 0;

    std::vector<double> weight(positions.size(), 0.0);
    std::vector<CompensatedSum> acc(positions.size());
    double dropped = 0.0;
    for (const auto& tri : all_triangles) {
        const Vec3& a = positions[tri[0]];
        const Vec3& b = positions[tri[1]];
        const Vec3& c = positions[tri[2]];
        const Vec3 center = normalized(a + b + c);
        const Coverage cov = domain.classify(center, cap_radius(center, a, b, c));
        if (cov == Coverage::Outside)
            continue;
        if (cov == Coverage::Inside) {
            const double third = spherical_triangle_area(a, b, c) / 3.0;
            for (std::uint32_t v : tri)
                acc[v].add(third);
            continue;
        }
        clipper.clip(a, b, c, 0, [&](const Vec3& centroid, double area) {
            std::uint32_t best = 0;
            double best_dot = -2.0;
            bool found = false;
            for (std::uint32_t v : tri) {
                if (!inside[v])
                    continue;
                const double d = dot(centroid, positions[v]);
                if (d > best_dot) {
                    best_dot = d;
                    best = v;
                    found = true;
                }
            }
            if (found)
                acc[best].add(area);
            else
                dropped += area;
        });
    }

    SphericalGrid grid(domain);
    grid.frequency_ = n;
    grid.dropped_area_ = dropped;
    std::vector<std::uint32_t> remap(positions.size(), UINT32_MAX);
    for (std::size_t v = 0; v < positions.size(); ++v) {
        weight[v] = acc[v].value();
        if (inside[v] && weight[v] > 0.0) {
            remap[v] = static_cast<std::uint32_t>(grid.nodes_.size());
            grid.nodes_.push_back(positions[v]);
            grid.weights_.push_back(weight[v]);
        }
    }
    for (const auto& tri : all_triangles) {
        if (remap[tri[0]] == UINT32_MAX || remap[tri[1]] == UINT32_MAX || remap[tri[2]] == UINT32_MAX)
            continue;
        grid.triangles_.push_back({remap[tri[0]], remap[tri[1]], remap[tri[2]]});
    }
    require(!grid.nodes_.empty(), ErrorCode::InvalidArgument, "grid: domain contains no nodes");
    return grid;
}

SphericalGrid SphericalGrid::build(const Domain& domain, std::size_t node_hint)
{
    require(node_hint > 0, ErrorCode::InvalidArgument, "grid: resolution must be positive");
    const double fraction = domain.area() / (4.0 * kPi);
    require(fraction > 0.0, ErrorCode::InvalidArgument, "grid: empty domain");
    const double full = static_cast<double>(node_hint) / fraction;
    const int n = std::max(1, static_cast<int>(std::lround(std::sqrt(std::max(0.0, full - 2.0) / 10.0))));
    return with_frequency(domain, n);
}

std::vector<std::array<std::uint32_t, 2>> SphericalGrid::edges() const
{
    std::vector<std::array<std::uint32_t, 2>> out;
    out.reserve(triangles_.size() * 3);
    for (const auto& t : triangles_)
        for (int k = 0; k < 3; ++k) {
            std::uint32_t a = t[k], b = t[(k + 1) % 3];
            if (a > b)
                std::swap(a, b);
            out.push_back({a, b});
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double SphericalGrid::total_weight() const { return compensated_sum(weights_); }

double integrate(const SphericalGrid& grid, std::span<const double> values)
{
    require(values.size() == grid.size(), ErrorCode::InvalidArgument,
            "integrate: value count does not match the grid");
    const auto w = grid.weights();
    CompensatedSum s;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!std::isfinite(values[j]))
            throw NumericError("integrate: non-finite value at node " + std::to_string(j), j);
        s.add(w[j] * values[j]);
    }
    return s.value();
}

double integrate(const SphericalGrid& grid, const std::function<double(const Vec3&)>& field)
{
    std::vector<double> values(grid.size());
    const auto nodes = grid.nodes();
    for (std::size_t j = 0; j < nodes.size(); ++j)
        values[j] = field(nodes[j]);
    return integrate(grid, values);
}

} // namespace lumen
