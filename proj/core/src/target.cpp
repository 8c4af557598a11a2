#include "lumen/target.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "lumen/error.hpp"
#include "lumen/summation.hpp"

namespace lumen {

namespace {

void validate_masses(std::size_t count, const std::vector<double>& masses, std::size_t overshoot)
{
    require(count > 0, ErrorCode::InvalidArgument, "target: no atoms");
    require(masses.size() == count, ErrorCode::InvalidArgument, "target: one mass per atom required");
    require(overshoot < count, ErrorCode::InvalidArgument, "target: overshoot index out of range");
    for (std::size_t i = 0; i < count; ++i)
        require(std::isfinite(masses[i]) && masses[i] > 0.0, ErrorCode::InvalidArgument,
                "target: atom " + std::to_string(i) + " has a nonpositive or non-finite mass");
}

std::vector<Atom> ordered_atoms(const std::vector<Vec3>& where, const std::vector<double>& masses,
                                std::size_t overshoot)
{
    std::vector<Atom> atoms;
    atoms.reserve(where.size());
    atoms.push_back({where[overshoot], masses[overshoot], overshoot});
    for (std::size_t i = 0; i < where.size(); ++i)
        if (i != overshoot)
            atoms.push_back({where[i], masses[i], i});
    return atoms;
}

} // namespace

TargetMeasure TargetMeasure::points(const std::vector<Vec3>& locations, const std::vector<double>& masses,
                                    std::size_t overshoot_index, std::optional<double> max_distance)
{
    validate_masses(locations.size(), masses, overshoot_index);
    TargetMeasure t;
    t.kind_ = TargetKind::Points;
    t.atoms_ = ordered_atoms(locations, masses, overshoot_index);
    t.max_distance_ = 0.0;
    t.min_distance_ = INFINITY;
    for (const Atom& a : t.atoms_) {
        const double r = norm(a.location);
        require(std::isfinite(r) && r > 0.0, ErrorCode::InvalidArgument,
                "target: atom " + std::to_string(a.source_index) + " coincides with the source");
        t.max_distance_ = std::max(t.max_distance_, r);
        t.min_distance_ = std::min(t.min_distance_, r);
    }
    if (max_distance) {
        require(*max_distance >= t.max_distance_ * (1.0 - 1e-12), ErrorCode::InvalidArgument,
                "target: M override below the largest atom distance");
        t.max_distance_ = *max_distance;
    }
    for (std::size_t i = 0; i < t.atoms_.size(); ++i)
        for (std::size_t j = i + 1; j < t.atoms_.size(); ++j)
            t.diameter_ = std::max(t.diameter_, distance(t.atoms_[i].location, t.atoms_[j].location));
    return t;
}

TargetMeasure TargetMeasure::directions(const std::vector<Vec3>& directions, const std::vector<double>& masses,
                                        std::size_t overshoot_index)
{
    validate_masses(directions.size(), masses, overshoot_index);
    std::vector<Vec3> unit;
    unit.reserve(directions.size());
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const double r = norm(directions[i]);
        require(std::isfinite(r) && r > 0.0, ErrorCode::InvalidArgument,
                "target: direction " + std::to_string(i) + " is zero");
        unit.push_back(directions[i] / r);
    }
    TargetMeasure t;
    t.kind_ = TargetKind::Directions;
    t.atoms_ = ordered_atoms(unit, masses, overshoot_index);
    t.max_distance_ = 1.0;
    t.min_distance_ = 1.0;
    for (std::size_t i = 0; i < t.atoms_.size(); ++i)
        for (std::size_t j = i + 1; j < t.atoms_.size(); ++j)
            t.diameter_ = std::max(t.diameter_, distance(t.atoms_[i].location, t.atoms_[j].location));
    return t;
}

std::vector<Vec3> TargetMeasure::locations() const
{
    std::vector<Vec3> out;
    for (const Atom& a : atoms_)
        out.push_back(a.location);
    return out;
}

std::vector<double> TargetMeasure::masses() const
{
    std::vector<double> out;
    for (const Atom& a : atoms_)
        out.push_back(a.mass);
    return out;
}

double TargetMeasure::total_mass() const
{
    CompensatedSum s;
    for (const Atom& a : atoms_)
        s.add(a.mass);
    return s.value();
}

double Rect::diameter() const { return std::hypot(width(), height()); }

PlanarPatch::PlanarPatch(const Vec3& origin, const Vec3& u_axis, const Vec3& v_axis, Rect extent)
    : origin_(origin), extent_(extent)
{
    require(norm(u_axis) > 0.0, ErrorCode::InvalidArgument, "patch: zero u axis");
    u_axis_ = normalized(u_axis);
    const Vec3 v_perp = v_axis - dot(v_axis, u_axis_) * u_axis_;
    require(norm(v_perp) > 1e-12 * std::max(1.0, norm(v_axis)), ErrorCode::InvalidArgument,
            "patch: u and v axes are parallel");
    v_axis_ = normalized(v_perp);
    normal_ = cross(u_axis_, v_axis_);
    require(extent.u1 > extent.u0 && extent.v1 > extent.v0, ErrorCode::InvalidArgument,
            "patch: empty extent");
}

std::pair<double, double> PlanarPatch::coordinates(const Vec3& y) const
{
    const Vec3 rel = y - origin_;
    return {dot(rel, u_axis_), dot(rel, v_axis_)};
}

double PlanarPatch::max_distance() const
{
    double best = 0.0;
    for (double u : {extent_.u0, extent_.u1})
        for (double v : {extent_.v0, extent_.v1})
            best = std::max(best, norm(point(u, v)));
    return best;
}

double PlanarPatch::min_distance() const
{
    // Foot of the perpendicular from the origin, clamped into the rectangle.
    const auto [u, v] = coordinates(Vec3{});
    const double cu = std::clamp(u, extent_.u0, extent_.u1);
    const double cv = std::clamp(v, extent_.v0, extent_.v1);
    return norm(point(cu, cv));
}

PlanarDensity PlanarDensity::uniform(double value)
{
    require(std::isfinite(value) && value > 0.0, ErrorCode::InvalidArgument,
            "density: uniform value must be positive");
    PlanarDensity d;
    d.kind_ = Kind::Uniform;
    d.value_ = value;
    return d;
}

PlanarDensity PlanarDensity::gaussian(double amplitude, double cu, double cv, double sigma)
{
    require(std::isfinite(amplitude) && amplitude > 0.0 && std::isfinite(sigma) && sigma > 0.0,
            ErrorCode::InvalidArgument, "density: gaussian amplitude and sigma must be positive");
    PlanarDensity d;
    d.kind_ = Kind::Gaussian;
    d.value_ = amplitude;
    d.cu_ = cu;
    d.cv_ = cv;
    d.sigma_ = sigma;
    return d;
}

PlanarDensity PlanarDensity::samples(Rect extent, std::size_t nu, std::size_t nv, std::vector<double> values)
{
    require(nu >= 2 && nv >= 2, ErrorCode::InvalidArgument, "density: lattice needs at least 2 x 2 samples");
    require(values.size() == nu * nv, ErrorCode::InvalidArgument, "density: lattice size mismatch");
    require(extent.u1 > extent.u0 && extent.v1 > extent.v0, ErrorCode::InvalidArgument,
            "density: empty lattice extent");
    for (double v : values)
        require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument,
                "density: lattice values must be finite and nonnegative");
    PlanarDensity d;
    d.kind_ = Kind::Samples;
    d.lattice_ = extent;
    d.nu_ = nu;
    d.nv_ = nv;
    d.values_ = std::move(values);
    return d;
}

double PlanarDensity::operator()(double u, double v) const
{
    switch (kind_) {
    case Kind::Uniform:
        return value_;
    case Kind::Gaussian: {
        const double du = u - cu_, dv = v - cv_;
        return value_ * std::exp(-(du * du + dv * dv) / (2.0 * sigma_ * sigma_));
    }
    case Kind::Samples: {
        if (u < lattice_.u0 || u > lattice_.u1 || v < lattice_.v0 || v > lattice_.v1)
            return 0.0;
        const double su = (u - lattice_.u0) / lattice_.width() * static_cast<double>(nu_ - 1);
        const double sv = (v - lattice_.v0) / lattice_.height() * static_cast<double>(nv_ - 1);
        const std::size_t i = std::min(static_cast<std::size_t>(su), nu_ - 2);
        const std::size_t j = std::min(static_cast<std::size_t>(sv), nv_ - 2);
        const double a = su - static_cast<double>(i), b = sv - static_cast<double>(j);
        const double f00 = values_[j * nu_ + i], f10 = values_[j * nu_ + i + 1];
        const double f01 = values_[(j + 1) * nu_ + i], f11 = values_[(j + 1) * nu_ + i + 1];
        return (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
    }
    }
    return 0.0;
}

double PlanarDensity::integral(const Rect& r) const
{
    switch (kind_) {
    case Kind::Uniform:
        return value_ * r.area();
    case Kind::Gaussian: {
        const double s = sigma_ * std::numbers::sqrt2;
        const double iu = std::erf((r.u1 - cu_) / s) - std::erf((r.u0 - cu_) / s);
        const double iv = std::erf((r.v1 - cv_) / s) - std::erf((r.v0 - cv_) / s);
        const double half = 0.5 * std::sqrt(std::numbers::pi) * s;
        return value_ * half * iu * half * iv;
    }
    case Kind::Samples: {
        // A bilinear function integrates to area times its value at the center
        // of any axis-aligned rectangle, so sum that over lattice-cell pieces.
        const double u0 = std::max(r.u0, lattice_.u0), u1 = std::min(r.u1, lattice_.u1);
        const double v0 = std::max(r.v0, lattice_.v0), v1 = std::min(r.v1, lattice_.v1);
        if (!(u1 > u0 && v1 > v0))
            return 0.0;
        const double du = lattice_.width() / static_cast<double>(nu_ - 1);
        const double dv = lattice_.height() / static_cast<double>(nv_ - 1);
        const auto first = [](double lo, double origin, double step, std::size_t cells) {
            return std::min(static_cast<std::size_t>(std::max(0.0, std::floor((lo - origin) / step))), cells - 1);
        };
        CompensatedSum s;
        for (std::size_t j = first(v0, lattice_.v0, dv, nv_ - 1); j < nv_ - 1; ++j) {
            const double cv0 = std::max(v0, lattice_.v0 + static_cast<double>(j) * dv);
            const double cv1 = std::min(v1, j + 2 == nv_ ? lattice_.v1 : lattice_.v0 + static_cast<double>(j + 1) * dv);
            if (cv0 >= v1)
                break;
            if (cv1 <= cv0)
                continue;
            for (std::size_t i = first(u0, lattice_.u0, du, nu_ - 1); i < nu_ - 1; ++i) {
                const double cu0 = std::max(u0, lattice_.u0 + static_cast<double>(i) * du);
                const double cu1 =
                    std::min(u1, i + 2 == nu_ ? lattice_.u1 : lattice_.u0 + static_cast<double>(i + 1) * du);
                if (cu0 >= u1)
                    break;
                if (cu1 <= cu0)
                    continue;
                s.add((cu1 - cu0) * (cv1 - cv0) * (*this)(0.5 * (cu0 + cu1), 0.5 * (cv0 + cv1)));
            }
        }
        return s.value();
    }
    }
    return 0.0;
}

void PlanarTarget::validate() const
{
    const Rect& e = patch.extent();
    require(overshoot_u >= e.u0 && overshoot_u <= e.u1 && overshoot_v >= e.v0 && overshoot_v <= e.v1,
            ErrorCode::InvalidArgument, "planar target: overshoot point outside the patch");
    require(patch.min_distance() > 0.0, ErrorCode::InvalidArgument, "planar target: patch contains the source");
    require(density.integral(e) > 0.0, ErrorCode::InvalidArgument, "planar target: zero total mass");
}

namespace {

bool half_open_contains(const Rect& cell, const Rect& whole, double u, double v)
{
    const bool in_u = (u >= cell.u0 && u < cell.u1) || (u == cell.u1 && cell.u1 == whole.u1);
    const bool in_v = (v >= cell.v0 && v < cell.v1) || (v == cell.v1 && cell.v1 == whole.v1);
    return in_u && in_v;
}

} // namespace

CellPartition CellPartition::from_rects(const PlanarTarget& target, std::vector<Cell> cells, int level)
{
    const Rect& whole = target.patch.extent();
    const double total = target.total_mass();
    CellPartition p;
    p.level_ = level;
    bool found = false;
    for (Cell& c : cells) {
        c.mass = target.density.integral(c.rect);
        const bool has_p0 = half_open_contains(c.rect, whole, target.overshoot_u, target.overshoot_v);
        if (has_p0) {
            require(c.mass > 1e-15 * total, ErrorCode::InvalidArgument,
                    "planar target: overshoot point lies outside the support of the density");
            c.u = target.overshoot_u;
            c.v = target.overshoot_v;
            p.overshoot_cell_ = p.cells_.size();
            found = true;
        } else {
            if (!(c.mass > 1e-15 * total))
                continue;
            c.u = 0.5 * (c.rect.u0 + c.rect.u1);
            c.v = 0.5 * (c.rect.v0 + c.rect.v1);
            if (!(target.density(c.u, c.v) > 0.0)) {
                // Snap to the densest point of a 9 x 9 sample of the cell.
                double best = -1.0;
                for (int a = 0; a < 9; ++a)
                    for (int b = 0; b < 9; ++b) {
                        const double u = c.rect.u0 + c.rect.width() * (a + 0.5) / 9.0;
                        const double v = c.rect.v0 + c.rect.height() * (b + 0.5) / 9.0;
                        const double g = target.density(u, v);
                        if (g > best) {
                            best = g;
                            c.u = u;
                            c.v = v;
                        }
                    }
            }
        }
        p.cells_.push_back(c);
    }
    require(found, ErrorCode::InvalidArgument, "planar target: overshoot point outside the patch");
    return p;
}

CellPartition CellPartition::initial(const PlanarTarget& target, double eps0)
{
    target.validate();
    require(std::isfinite(eps0) && eps0 > 0.0, ErrorCode::InvalidArgument, "partition: eps0 must be positive");
    const Rect& e = target.patch.extent();
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(e.diameter() / eps0 * (1.0 - 1e-12))));
    std::vector<Cell> cells;
    cells.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            Cell c;
            c.rect.u0 = e.u0 + e.width() * static_cast<double>(i) / static_cast<double>(n);
            c.rect.u1 = i + 1 == n ? e.u1 : e.u0 + e.width() * static_cast<double>(i + 1) / static_cast<double>(n);
            c.rect.v0 = e.v0 + e.height() * static_cast<double>(j) / static_cast<double>(n);
            c.rect.v1 = j + 1 == n ? e.v1 : e.v0 + e.height() * static_cast<double>(j + 1) / static_cast<double>(n);
            cells.push_back(c);
        }
    return from_rects(target, std::move(cells), 0);
}

CellPartition CellPartition::refine(const PlanarTarget& target) const
{
    std::vector<Cell> cells;
    cells.reserve(cells_.size() * 4);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const Rect& r = cells_[k].rect;
        const double um = 0.5 * (r.u0 + r.u1), vm = 0.5 * (r.v0 + r.v1);
        const std::array<Rect, 4> parts = {{{r.u0, um, r.v0, vm}, {um, r.u1, r.v0, vm},
                                            {r.u0, um, vm, r.v1}, {um, r.u1, vm, r.v1}}};
        for (const Rect& q : parts) {
            Cell c;
            c.rect = q;
            c.parent = static_cast<std::ptrdiff_t>(k);
            cells.push_back(c);
        }
    }
    return from_rects(target, std::move(cells), level_ + 1);
}

double CellPartition::max_diameter() const
{
    double d = 0.0;
    for (const Cell& c : cells_)
        d = std::max(d, c.rect.diameter());
    return d;
}

double CellPartition::total_mass() const
{
    CompensatedSum s;
    for (const Cell& c : cells_)
        s.add(c.mass);
    return s.value();
}

TargetMeasure CellPartition::to_target(const PlanarTarget& target) const
{
    std::vector<Vec3> where;
    std::vector<double> mass;
    where.reserve(cells_.size());
    for (const Cell& c : cells_) {
        where.push_back(target.patch.point(c.u, c.v));
        mass.push_back(c.mass);
    }
    return TargetMeasure::points(where, mass, overshoot_cell_, target.max_distance());
}

} // namespace lumen
