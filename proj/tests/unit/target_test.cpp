#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lumen/error.hpp"
#include "lumen/target.hpp"

using namespace lumen;

namespace {

// Midpoint rule on an n x n lattice over r.
double fine_integral(const PlanarDensity& g, const Rect& r, int n)
{
    double s = 0.0;
    const double du = r.width() / n, dv = r.height() / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s += g(r.u0 + (i + 0.5) * du, r.v0 + (j + 0.5) * dv);
    return s * du * dv;
}

PlanarTarget unit_square(PlanarDensity g, double u0 = 0.3, double v0 = 0.6)
{
    return PlanarTarget{PlanarPatch({0.0, 0.0, -1.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 1.0, 0.0, 1.0}),
                        std::move(g), u0, v0};
}

bool inside(const Rect& r, double u, double v)
{
    return u >= r.u0 && u <= r.u1 && v >= r.v0 && v <= r.v1;
}

} // namespace

TEST(TargetMeasure, OvershootMovesToFront)
{
    const TargetMeasure t = TargetMeasure::points({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}, {1.0, 2.0, 3.0}, 2);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t.atom(0).source_index, 2u);
    EXPECT_DOUBLE_EQ(t.atom(0).mass, 3.0);
    EXPECT_EQ(t.atom(1).source_index, 0u);
    EXPECT_EQ(t.atom(2).source_index, 1u);
    EXPECT_DOUBLE_EQ(t.total_mass(), 6.0);
    EXPECT_DOUBLE_EQ(t.max_distance(), 3.0);
    EXPECT_DOUBLE_EQ(t.min_distance(), 1.0);
    EXPECT_NEAR(t.diameter(), std::sqrt(13.0), 1e-15);
}

TEST(TargetMeasure, Validation)
{
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io; // sentinel: nothing thrown
    };
    EXPECT_EQ(code([] { TargetMeasure::points({}, {}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code([] { TargetMeasure::points({{1, 0, 0}}, {0.0}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code([] { TargetMeasure::points({{0, 0, 0}}, {1.0}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code([] { TargetMeasure::points({{1, 0, 0}}, {1.0}, 1); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code([] { TargetMeasure::points({{1, 0, 0}}, {1.0, 2.0}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code([] { TargetMeasure::points({{1, 0, 0}}, {1.0}, 0, 0.5); }), ErrorCode::InvalidArgument);
}

TEST(TargetMeasure, DirectionsAreNormalized)
{
    const TargetMeasure t = TargetMeasure::directions({{0, 0, -2}, {3, 0, 0}}, {1.0, 1.0});
    EXPECT_EQ(t.kind(), TargetKind::Directions);
    for (const Atom& a : t.atoms())
        EXPECT_NEAR(norm(a.location), 1.0, 1e-15);
}

TEST(TargetMeasure, MaxDistanceOverride)
{
    const TargetMeasure t = TargetMeasure::points({{1, 0, 0}}, {1.0}, 0, 2.5);
    EXPECT_DOUBLE_EQ(t.max_distance(), 2.5);
}

TEST(PlanarPatch, OrthonormalizesAndRoundTrips)
{
    const PlanarPatch p({0.1, 0.2, -1.0}, {2.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {0.0, 1.0, -0.5, 0.5});
    EXPECT_NEAR(norm(p.u_axis()), 1.0, 1e-15);
    EXPECT_NEAR(norm(p.v_axis()), 1.0, 1e-15);
    EXPECT_NEAR(dot(p.u_axis(), p.v_axis()), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(dot(p.normal(), Vec3{0, 0, 1})), 1.0, 1e-15);
    const auto [u, v] = p.coordinates(p.point(0.3, -0.2));
    EXPECT_NEAR(u, 0.3, 1e-15);
    EXPECT_NEAR(v, -0.2, 1e-15);
    EXPECT_THROW(PlanarPatch({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0, 1}), Error);
}

TEST(PlanarPatch, DistancesMatchBruteForce)
{
    const PlanarPatch p({0.0, 0.0, -1.0}, {1.0, 0.0, 0.2}, {0.0, 1.0, 0.0}, {-0.3, 0.8, -0.4, 0.6});
    double lo = INFINITY, hi = 0.0;
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j <= 400; ++j) {
            const double r = norm(p.point(-0.3 + 1.1 * i / 400.0, -0.4 + 1.0 * j / 400.0));
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    EXPECT_NEAR(p.max_distance(), hi, 1e-12);
    EXPECT_LE(p.min_distance(), lo + 1e-12);
    EXPECT_GE(p.min_distance(), lo - 1e-5);
}

TEST(PlanarDensity, IntegralsMatchFineQuadrature)
{
    const Rect r{0.1, 0.7, -0.2, 0.5};
    EXPECT_NEAR(PlanarDensity::uniform(2.0).integral(r), 2.0 * r.area(), 1e-15);
    const PlanarDensity gauss = PlanarDensity::gaussian(3.0, 0.4, 0.1, 0.15);
    EXPECT_NEAR(gauss.integral(r) / fine_integral(gauss, r, 800), 1.0, 1e-5);
    const Rect lattice{0.0, 1.0, -0.5, 0.5};
    const PlanarDensity samp = PlanarDensity::samples(lattice, 3, 2, {0.0, 1.0, 4.0, 2.0, 0.5, 0.0});
    EXPECT_NEAR(samp.integral(r) / fine_integral(samp, r, 800), 1.0, 1e-5);
    EXPECT_NEAR(samp(0.5, -0.5), 1.0, 1e-15);
    EXPECT_NEAR(samp(1.0, 0.5), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(samp(1.5, 0.0), 0.0);
}

TEST(PlanarDensity, Validation)
{
    EXPECT_THROW(PlanarDensity::uniform(0.0), Error);
    EXPECT_THROW(PlanarDensity::gaussian(1.0, 0.0, 0.0, 0.0), Error);
    EXPECT_THROW(PlanarDensity::samples({0, 1, 0, 1}, 1, 2, {1.0, 1.0}), Error);
    EXPECT_THROW(PlanarDensity::samples({0, 1, 0, 1}, 2, 2, {1.0, 1.0, -1.0, 1.0}), Error);
}

TEST(PlanarTarget, Validate)
{
    EXPECT_NO_THROW(unit_square(PlanarDensity::uniform(1.0)).validate());
    EXPECT_THROW(unit_square(PlanarDensity::uniform(1.0), 1.5, 0.5).validate(), Error);
    const PlanarTarget through_origin{
        PlanarPatch({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {-1.0, 1.0, -1.0, 1.0}),
        PlanarDensity::uniform(1.0), 0.5, 0.5};
    EXPECT_THROW(through_origin.validate(), Error);
}

TEST(CellPartition, UniformSplitIntoQuarters)
{
    const PlanarTarget t = unit_square(PlanarDensity::uniform(2.0));
    const CellPartition p0 = CellPartition::initial(t, t.diameter());
    ASSERT_EQ(p0.cells().size(), 1u);
    const CellPartition p1 = p0.refine(t);
    ASSERT_EQ(p1.cells().size(), 4u);
    for (const Cell& c : p1.cells()) {
        EXPECT_NEAR(c.mass, 0.5, 1e-6);
        EXPECT_EQ(c.parent, 0);
    }
}

TEST(CellPartition, InvariantsAcrossLevels)
{
    const PlanarTarget t = unit_square(PlanarDensity::gaussian(5.0, 0.4, 0.5, 0.2), 0.37, 0.61);
    const double eps0 = 0.5;
    CellPartition p = CellPartition::initial(t, eps0);
    const double eta = t.total_mass();
    for (int level = 0; level <= 4; ++level) {
        EXPECT_EQ(p.level(), level);
        EXPECT_LE(p.max_diameter(), eps0 / std::pow(2.0, level) * (1.0 + 1e-12));
        EXPECT_NEAR(p.total_mass() / eta, 1.0, 1e-9);
        for (const Cell& c : p.cells()) {
            EXPECT_GT(c.mass, 0.0);
            EXPECT_TRUE(inside(c.rect, c.u, c.v));
        }
        const Cell& o = p.cells()[p.overshoot_cell()];
        EXPECT_DOUBLE_EQ(o.u, 0.37);
        EXPECT_DOUBLE_EQ(o.v, 0.61);
        EXPECT_TRUE(inside(o.rect, 0.37, 0.61));
        if (level < 4)
            p = p.refine(t);
    }
}

TEST(CellPartition, GaussianCellsMatchFineQuadrature)
{
    const PlanarTarget t = unit_square(PlanarDensity::gaussian(5.0, 0.4, 0.5, 0.2));
    const CellPartition p = CellPartition::initial(t, 0.36).refine(t);
    for (const Cell& c : p.cells())
        EXPECT_NEAR(c.mass / fine_integral(t.density, c.rect, 100), 1.0, 1e-4);
}

TEST(CellPartition, ZeroMassCellsAreDropped)
{
    // Density vanishes on u <= 0.5.
    const PlanarDensity g = PlanarDensity::samples({0.0, 1.0, 0.0, 1.0}, 3, 2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0});
    const PlanarTarget t = unit_square(g, 0.8, 0.5);
    const CellPartition p = CellPartition::initial(t, t.diameter()).refine(t).refine(t);
    EXPECT_EQ(p.cells().size(), 8u);
    for (const Cell& c : p.cells()) {
        EXPECT_GE(c.rect.u0, 0.5 - 1e-15);
        EXPECT_GT(g(c.u, c.v), 0.0);
    }
    EXPECT_NEAR(p.total_mass(), 0.25, 1e-12);
}

TEST(CellPartition, ToTargetPutsOvershootFirstAndPinsM)
{
    const PlanarTarget t = unit_square(PlanarDensity::uniform(1.0), 0.8, 0.2);
    const CellPartition p = CellPartition::initial(t, t.diameter()).refine(t).refine(t);
    const TargetMeasure m = p.to_target(t);
    EXPECT_EQ(m.size(), p.cells().size());
    EXPECT_EQ(m.atom(0).source_index, p.overshoot_cell());
    EXPECT_NEAR(distance(m.atom(0).location, t.overshoot_point()), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(m.max_distance(), t.max_distance());
    EXPECT_NEAR(m.total_mass(), 1.0, 1e-12);
    for (const Atom& a : m.atoms())
        EXPECT_NEAR(a.location.z, -1.0, 1e-15);
}
