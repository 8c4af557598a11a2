#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lumen/envelope.hpp"
#include "lumen/error.hpp"
#include "lumen/geometry.hpp"
#include "lumen/solver.hpp"
#include "lumen/validate.hpp"
#include "lumen_test/fixtures.hpp"
#include "lumen_test/transport_oracle.hpp"

using namespace lumen;
using namespace lumen::test;

namespace {

const SphericalGrid& hemi_grid()
{
    static const SphericalGrid g = SphericalGrid::build(desk_domain(), 20000);
    return g;
}

const SampledIntensity& hemi_flux()
{
    static const SampledIntensity s = sample(IntensityField::constant(1.0), hemi_grid());
    return s;
}

// Plane z = -1 seen through a single ellipsoid whose far focus sits above it.
EllipsoidTransport oracle()
{
    return EllipsoidTransport({0.3, 0.1, -0.5}, 1.0,
                              PlanarPatch({0.0, 0.0, -1.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {-5.0, 5.0, -5.0, 5.0}));
}

TransportCheck oracle_check(double h, std::size_t samples = 400)
{
    const EllipsoidTransport t = oracle();
    const Reflector r = Reflector::near({{0.3, 0.1, -0.5}}, {1.0});
    TransportOptions opt;
    opt.samples = samples;
    opt.h = h;
    return transport_residual(r, Domain::cap(kUp, std::numbers::pi / 4.0), IntensityField::constant(1.0), t.patch(),
                              [&](double u, double v) { return t.density(u, v); }, opt);
}

} // namespace

TEST(CounterRng, DeterministicAndInRange)
{
    for (std::uint64_t c = 0; c < 1000; ++c) {
        const double u = counter_uniform(42, c);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_EQ(u, counter_uniform(42, c));
    }
    EXPECT_NE(counter_uniform(1, 0), counter_uniform(2, 0));
    EXPECT_NE(counter_uniform(1, 0), counter_uniform(1, 1));
    const CapDomain cap{kUp, 0.3};
    for (int i = 0; i < 100; ++i) {
        const Vec3 x = sample_cap(cap, counter_uniform(3, 2 * i), counter_uniform(3, 2 * i + 1));
        ASSERT_NEAR(norm(x), 1.0, 1e-14);
        ASSERT_GE(x.z, std::cos(0.3) - 1e-14);
    }
}

TEST(Raytrace, SingleEllipsoidHitsFocus)
{
    const Vec3 p{0.2, -0.1, -0.9};
    const Reflector r = Reflector::near({p}, {2.0});
    RayTraceOptions opt;
    opt.rays = 20000;
    const RayTraceResult res = raytrace(r, desk_domain(), IntensityField::constant(1.0), WeightModel::inverse_square(),
                                        norm(p), opt);
    EXPECT_EQ(res.unmatched, 0u);
    EXPECT_EQ(res.accepted, res.rays);
    EXPECT_LE(res.focus_miss[0], 1e-9 * norm(p));
    EXPECT_NEAR(res.totals[0], res.traced_flux, 1e-12 * res.traced_flux);
}

TEST(Raytrace, SingleParaboloidSendsAlongAxis)
{
    const Reflector r = Reflector::far({{0.0, 0.0, -1.0}}, {2.0});
    RayTraceOptions opt;
    opt.rays = 20000;
    const RayTraceResult res = raytrace(r, far_domain(), IntensityField::constant(1.0), WeightModel::inverse_square(),
                                        1.0, opt);
    EXPECT_EQ(res.unmatched, 0u);
    EXPECT_LE(res.focus_miss[0], 1e-12);
}

TEST(Raytrace, AgreesWithQuadratureAndConverges)
{
    const TargetMeasure t = desk_target();
    const SolveReport s = solve_discrete(hemi_grid(), hemi_flux(), t, SolverConfig{});
    RayTraceOptions opt;
    opt.rays = 200000;
    const RayTraceResult a = raytrace(s.reflector, desk_domain(), IntensityField::constant(1.0),
                                      WeightModel::inverse_square(), t.max_distance(), opt);
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_LE(std::abs(a.totals[i] - s.measure.per_atom[i]), 3.0 * a.standard_error[i] + 2e-3 * s.measure.per_atom[i])
            << "atom " << i;
        sum += a.totals[i];
    }
    EXPECT_NEAR(sum, a.traced_flux, 1e-12 * a.traced_flux);

    opt.rays *= 4;
    const RayTraceResult b = raytrace(s.reflector, desk_domain(), IntensityField::constant(1.0),
                                      WeightModel::inverse_square(), t.max_distance(), opt);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ratio = b.standard_error[i] / a.standard_error[i];
        EXPECT_GT(ratio, 0.4);
        EXPECT_LT(ratio, 0.6);
    }
}

TEST(Raytrace, SameSeedSameBits)
{
    const Reflector r = Reflector::near(desk_locations(), {3.0, 2.8, 2.9, 2.7, 3.1});
    RayTraceOptions opt;
    opt.rays = 5000;
    opt.seed = 99;
    const auto run = [&] {
        return raytrace(r, desk_domain(), IntensityField::constant(1.0), WeightModel::inverse_square(), 1.0, opt);
    };
    EXPECT_EQ(run().totals, run().totals);
}

TEST(Transport, OracleJacobianMatchesFiniteDifferences)
{
    const EllipsoidTransport t = oracle();
    for (auto [a, b] : {std::pair{0.1, 0.2}, {-0.3, 0.05}, {0.0, -0.4}}) {
        const double h = 1e-5;
        const auto T = [&](double x, double y) { return *t.forward({x, y, std::sqrt(1.0 - x * x - y * y)}); };
        const auto [ua, va] = T(a + h, b);
        const auto [ua2, va2] = T(a - h, b);
        const auto [ub, vb] = T(a, b + h);
        const auto [ub2, vb2] = T(a, b - h);
        const double det = ((ua - ua2) * (vb - vb2) - (ub - ub2) * (va - va2)) / (4.0 * h * h);
        EXPECT_NEAR(t.jacobian(a, b) / std::abs(det), 1.0, 1e-6);
    }
}

TEST(Transport, OracleInverseRoundTrips)
{
    const EllipsoidTransport t = oracle();
    const Vec3 x = normalized(Vec3{0.2, -0.1, 1.0});
    const auto [u, v] = *t.forward(x);
    EXPECT_NEAR(distance(t.inverse(u, v), x), 0.0, 1e-12);
}

TEST(Transport, OracleDensityMatchesBinnedImage)
{
    // Push the grid's quadrature weights forward and bin them.
    const EllipsoidTransport t = oracle();
    const Domain cap = Domain::cap(kUp, std::numbers::pi / 4.0);
    const SphericalGrid g = SphericalGrid::build(cap, 60000);
    const auto [u0, v0] = *t.forward(kUp);
    const Rect bin{u0 - 0.05, u0 + 0.05, v0 - 0.05, v0 + 0.05};
    double binned = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const Vec3& x = g.nodes()[j];
        const auto uv = t.forward(x);
        if (uv && uv->first >= bin.u0 && uv->first < bin.u1 && uv->second >= bin.v0 && uv->second < bin.v1) {
            const double rho = t.ellipsoid().radius(x);
            binned += g.weights()[j] * t.ellipsoid().cosine(x) / (rho * rho);
        }
    }
    double exact = 0.0;
    const int n = 200;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            exact += t.density(bin.u0 + (i + 0.5) * bin.width() / n, bin.v0 + (k + 0.5) * bin.height() / n);
    exact *= bin.area() / (n * n);
    EXPECT_NEAR(binned / exact, 1.0, 0.02);
}

TEST(Transport, EqualityForExactPushforward)
{
    const TransportCheck c = oracle_check(1e-4);
    EXPECT_GT(c.evaluated, 300u);
    EXPECT_EQ(c.violations, 0u);
    EXPECT_LT(c.max_rel_residual, 1e-6);
}

TEST(Transport, ResidualShrinksWithStep)
{
    const TransportCheck coarse = oracle_check(4e-3);
    const TransportCheck fine = oracle_check(2e-3);
    ASSERT_GT(fine.max_rel_residual, 0.0);
    EXPECT_GE(coarse.max_rel_residual / fine.max_rel_residual, 1.8);
}

TEST(Transport, DetectsUnderestimatedDensity)
{
    const EllipsoidTransport t = oracle();
    const Reflector r = Reflector::near({{0.3, 0.1, -0.5}}, {1.0});
    TransportOptions opt;
    opt.samples = 200;
    const TransportCheck c =
        transport_residual(r, Domain::cap(kUp, std::numbers::pi / 4.0), IntensityField::constant(1.0), t.patch(),
                           [&](double u, double v) { return 1.5 * t.density(u, v); }, opt);
    EXPECT_EQ(c.violations, c.evaluated);
    EXPECT_NEAR(c.max_violation, 0.5, 1e-4);
}

TEST(ConstantWeight, GapWithinBound)
{
    const std::vector<Vec3> loc{{0.05, 0.02, -0.8}, {0.6, 0.0, -0.8}, {-0.45, 0.35, -0.8}};
    for (double delta : {15.0 / 8.0, 8.0}) {
        SolverConfig cfg;
        cfg.delta = delta;
        cfg.k = DeltaBound::from_delta(delta).ratio();
        const TargetMeasure probe = TargetMeasure::points(loc, {1.0, 1.0, 1.0});
        const double C = feasibility_constant(delta, cfg.k, probe.max_distance());
        const double eta = C * hemi_flux().total_flux;
        const TargetMeasure t = TargetMeasure::points(loc, {0.4 * eta, 0.35 * eta, 0.25 * eta});
        const ConstantWeightComparison cmp = compare_constant_weight(hemi_grid(), hemi_flux(), t, cfg);
        const double ratio = DeltaBound::from_delta(delta).ratio();
        EXPECT_NEAR(cmp.factor, std::pow(ratio, 5) - 1.0, 1e-12 * cmp.factor);
        EXPECT_GT(cmp.gap, 0.0) << "delta " << delta;
        EXPECT_LE(cmp.gap, cmp.bound) << "delta " << delta;
    }
    EXPECT_NEAR(std::pow(5.0 / 3.0, 5) - 1.0, 11.8601, 1e-4);
}

TEST(ConstantWeight, RequiresCalibration)
{
    const TargetMeasure t = TargetMeasure::points({{0.0, 0.0, -1.0}, {0.5, 0.0, -0.8}}, {0.01, 0.01});
    SolverConfig cfg;
    cfg.k = DeltaBound::from_delta(cfg.delta).ratio();
    EXPECT_THROW(compare_constant_weight(hemi_grid(), hemi_flux(), t, cfg), Error);
}

TEST(Obstruction, SingleAtomIsClear)
{
    const Reflector r = Reflector::near({{0.1, 0.0, -1.0}}, {0.3});
    EXPECT_EQ(obstruction_raycheck(r, desk_domain(), 10000, 1).violations, 0u);
}

TEST(Obstruction, ClearAboveThreshold)
{
    const SolveReport s = solve_discrete(hemi_grid(), hemi_flux(), desk_target(), SolverConfig{});
    ASSERT_TRUE(visibility_report(desk_target(), desk_domain(), 15.0 / 8.0).obstruction_clear);
    EXPECT_EQ(obstruction_raycheck(s.reflector, desk_domain(), 10000, 2).violations, 0u);
}

TEST(Obstruction, SmallDeltaIsObstructed)
{
    // Foci outside each other's supporting ellipsoids.
    const Reflector r = Reflector::near({{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}, {0.05, 0.05});
    const ObstructionResult o = obstruction_raycheck(r, Domain::sphere(), 10000, 3);
    EXPECT_GT(o.violations, 0u);
    EXPECT_GT(o.max_excess, 0.0);
}
