#pragma once

// Target measures: finite atoms (points for the near field, directions for
// the far field) and densities on a planar rectangle with their quadtree
// cellizations.

#include <cstddef>
#include <optional>
#include <vector>

#include "lumen/vec3.hpp"

namespace lumen {

enum class TargetKind
{
    Points,     // near field: atoms are points P_i
    Directions, // far field: atoms are unit directions m_i
};

struct Atom
{
    Vec3 location;
    double mass = 0.0;
    /// Position in the caller's list before the overshoot atom was moved to the front.
    std::size_t source_index = 0;
};

/// Discrete measure sum g_i delta_{P_i}. The overshoot atom is stored at index 0.
class TargetMeasure
{
public:
    /// Throws invalid-argument for empty input, a nonpositive mass, a point at
    /// the origin or an out-of-range overshoot index. `max_distance` overrides
    /// M when a cellization must keep the M of its continuous parent.
    static TargetMeasure points(const std::vector<Vec3>& locations, const std::vector<double>& masses,
                                std::size_t overshoot_index = 0,
                                std::optional<double> max_distance = std::nullopt);

    /// Directions are normalized. Same validation as points().
    static TargetMeasure directions(const std::vector<Vec3>& directions, const std::vector<double>& masses,
                                    std::size_t overshoot_index = 0);

    TargetKind kind() const { return kind_; }
    std::size_t size() const { return atoms_.size(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const Atom& atom(std::size_t i) const { return atoms_[i]; }
    std::vector<Vec3> locations() const;
    std::vector<double> masses() const;
    double total_mass() const;

    /// M = max OP_i (points only; 1 for directions).
    double max_distance() const { return max_distance_; }
    /// m = min OP_i (points only; 1 for directions).
    double min_distance() const { return min_distance_; }
    /// diam(D) over the atoms.
    double diameter() const { return diameter_; }

private:
    TargetKind kind_ = TargetKind::Points;
    std::vector<Atom> atoms_;
    double max_distance_ = 0.0;
    double min_distance_ = 0.0;
    double diameter_ = 0.0;
};

/// Axis-aligned rectangle [u0, u1] x [v0, v1] in patch coordinates.
struct Rect
{
    double u0 = 0.0;
    double u1 = 0.0;
    double v0 = 0.0;
    double v1 = 0.0;

    double width() const { return u1 - u0; }
    double height() const { return v1 - v0; }
    double area() const { return width() * height(); }
    double diameter() const;
};

/// Rectangle embedded in a plane: origin + u * u_axis + v * v_axis for
/// (u, v) in `extent`. Axes are orthonormalized on construction.
class PlanarPatch
{
public:
    PlanarPatch(const Vec3& origin, const Vec3& u_axis, const Vec3& v_axis, Rect extent);

    Vec3 point(double u, double v) const { return origin_ + u * u_axis_ + v * v_axis_; }
    /// Patch coordinates of the orthogonal projection of y onto the plane.
    std::pair<double, double> coordinates(const Vec3& y) const;
    const Vec3& origin() const { return origin_; }
    const Vec3& u_axis() const { return u_axis_; }
    const Vec3& v_axis() const { return v_axis_; }
    const Vec3& normal() const { return normal_; }
    const Rect& extent() const { return extent_; }

    /// max |y| over the rectangle (attained at a corner).
    double max_distance() const;
    /// min |y| over the rectangle.
    double min_distance() const;

private:
    Vec3 origin_;
    Vec3 u_axis_;
    Vec3 v_axis_;
    Vec3 normal_;
    Rect extent_;
};

/// Nonnegative areal density g(u, v) in W per unit area, with exact rectangle integrals.
class PlanarDensity
{
public:
    static PlanarDensity uniform(double value);
    /// amplitude * exp(-((u-cu)^2 + (v-cv)^2) / (2 sigma^2)).
    static PlanarDensity gaussian(double amplitude, double cu, double cv, double sigma);
    /// Bilinear interpolation of an nu x nv lattice spanning `extent`
    /// (row-major in v, values[j * nu + i] at u index i); zero outside.
    static PlanarDensity samples(Rect extent, std::size_t nu, std::size_t nv, std::vector<double> values);

    double operator()(double u, double v) const;
    /// Integral over `r`; exact for all kinds.
    double integral(const Rect& r) const;

private:
    enum class Kind
    {
        Uniform,
        Gaussian,
        Samples,
    };
    Kind kind_ = Kind::Uniform;
    double value_ = 0.0;
    double cu_ = 0.0, cv_ = 0.0, sigma_ = 1.0;
    Rect lattice_;
    std::size_t nu_ = 0, nv_ = 0;
    std::vector<double> values_;
};

/// Continuous target: a density supported on a planar patch together with the
/// overshoot point P_0 in patch coordinates.
struct PlanarTarget
{
    PlanarPatch patch;
    PlanarDensity density;
    double overshoot_u = 0.0;
    double overshoot_v = 0.0;

    /// Throws invalid-argument if P_0 lies outside the patch or the patch contains the origin.
    void validate() const;
    double total_mass() const { return density.integral(patch.extent()); }
    Vec3 overshoot_point() const { return patch.point(overshoot_u, overshoot_v); }
    double max_distance() const { return patch.max_distance(); }
    double min_distance() const { return patch.min_distance(); }
    double diameter() const { return patch.extent().diameter(); }
};

struct Cell
{
    Rect rect;
    double u = 0.0; // representative point
    double v = 0.0;
    double mass = 0.0;
    /// Index of the enclosing cell one level up; -1 at level 0.
    std::ptrdiff_t parent = -1;
};

/// Quadtree cellization of a planar target. Cells with no mass are dropped;
/// the cell containing P_0 (half-open convention, closed at the far edges of
/// the patch) uses P_0 as its representative.
class CellPartition
{
public:
    /// Level 0: an n x n split of the patch with n = ceil(diam / eps0).
    static CellPartition initial(const PlanarTarget& target, double eps0);

    /// Split every cell into four and re-integrate masses.
    CellPartition refine(const PlanarTarget& target) const;

    int level() const { return level_; }
    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t overshoot_cell() const { return overshoot_cell_; }
    double max_diameter() const;
    double total_mass() const;

    /// Atoms at the representatives, overshoot cell first, M pinned to the patch's M.
    /// atoms()[k].source_index is the cell index.
    TargetMeasure to_target(const PlanarTarget& target) const;

private:
    static CellPartition from_rects(const PlanarTarget& target, std::vector<Cell> cells, int level);

    int level_ = 0;
    std::vector<Cell> cells_;
    std::size_t overshoot_cell_ = 0;
};

} // namespace lumen
