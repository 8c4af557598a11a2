#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lumen/error.hpp"
#include "lumen/geometry.hpp"

using namespace lumen;

namespace {

Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    return normalized(Vec3{n(rng), n(rng), n(rng)});
}

} // namespace

TEST(Eccentricity, ExactValues)
{
    EXPECT_NEAR(eccentricity_from_focal(0.75, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(eccentricity_from_focal(1.5, 2.0), 0.5, 1e-15);
    EXPECT_NEAR(eccentricity_from_focal(10.0, 1.0), std::sqrt(101.0) - 10.0, 1e-15);
    EXPECT_NEAR(eccentricity_from_focal(10.0, 1.0), 0.0498756, 1e-7);
}

TEST(Eccentricity, RejectsNonpositive)
{
    EXPECT_THROW(eccentricity_from_focal(0.0, 1.0), Error);
    EXPECT_THROW(eccentricity_from_focal(1.0, -1.0), Error);
    try {
        eccentricity_from_focal(-1.0, 1.0);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}

TEST(FocalParameter, ExactValues)
{
    EXPECT_NEAR(focal_from_eccentricity(0.5, 1.0), 0.75, 1e-15);
    EXPECT_NEAR(focal_from_eccentricity(0.5, 2.0), 1.5, 1e-15);
    EXPECT_LT(focal_from_eccentricity(1.0 - 1e-9, 1.0), 1e-8);
    EXPECT_THROW(focal_from_eccentricity(1.0, 1.0), Error);
    EXPECT_THROW(focal_from_eccentricity(0.0, 1.0), Error);
}

TEST(FocalParameter, RoundTripOverSixDecades)
{
    for (double ratio = 1e-3; ratio <= 1e3; ratio *= 1.07) {
        for (double op : {0.1, 1.0, 37.0}) {
            const double d = ratio * op;
            const double back = focal_from_eccentricity(eccentricity_from_focal(d, op), op);
            EXPECT_NEAR(back / d, 1.0, 1e-12) << "d/OP = " << ratio;
        }
    }
}

TEST(Ellipsoid, StoredInvariants)
{
    const Ellipsoid e = Ellipsoid::from_focal({0.0, 3.0, 4.0}, 2.0);
    EXPECT_NEAR(norm(e.axis()), 1.0, 1e-15);
    EXPECT_NEAR(e.focal_distance(), 5.0, 1e-15);
    const double eps = e.eccentricity();
    EXPECT_NEAR(2.0 * eps * e.focal_param() / (1.0 - eps * eps) / 5.0, 1.0, 1e-12);
    EXPECT_NEAR(e.major_sum(), 5.0 / eps, 1e-12);
}

TEST(Ellipsoid, EccentricityDecreasesAndRadiusIncreasesWithD)
{
    const Vec3 p{0.3, -0.2, 0.9};
    const Vec3 x = normalized(Vec3{0.1, 0.7, -0.2});
    double prev_eps = 1.0, prev_rho = 0.0;
    for (double d = 0.01; d < 100.0; d *= 1.3) {
        const Ellipsoid e = Ellipsoid::from_focal(p, d);
        EXPECT_LT(e.eccentricity(), prev_eps);
        EXPECT_GT(e.radius(x), prev_rho);
        prev_eps = e.eccentricity();
        prev_rho = e.radius(x);
    }
}

TEST(Ellipsoid, RadiusExamples)
{
    const Vec3 m{0.0, 0.0, 1.0};
    const Ellipsoid e = Ellipsoid::from_eccentricity(m * 4.0 / 3.0, 0.5);
    EXPECT_NEAR(e.focal_param(), 1.0, 1e-15);
    EXPECT_NEAR(e.radius({1.0, 0.0, 0.0}), 1.0, 1e-15);
    EXPECT_NEAR(e.radius(m), 2.0, 1e-15);
    EXPECT_NEAR(e.radius(-m), 2.0 / 3.0, 1e-15);
}

TEST(Ellipsoid, NormalExamples)
{
    const Vec3 m{0.0, 0.0, 1.0};
    const Ellipsoid e = Ellipsoid::from_eccentricity(m, 0.5);
    const Vec3 at_pole = e.normal(m);
    EXPECT_NEAR(distance(at_pole, m), 0.0, 1e-15);
    EXPECT_NEAR(distance(e.normal(-m), -m), 0.0, 1e-15);
    const Vec3 side = e.normal({1.0, 0.0, 0.0});
    EXPECT_NEAR(side.x, 2.0 / std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(side.y, 0.0, 1e-15);
    EXPECT_NEAR(side.z, -1.0 / std::sqrt(5.0), 1e-15);
}

TEST(Ellipsoid, NormalMatchesGradientOfImplicitForm)
{
    // |X| + |X - P| = c has gradient X/|X| + (X - P)/|X - P|.
    std::mt19937_64 rng(3);
    for (int n = 0; n < 200; ++n) {
        const Vec3 p = 2.0 * random_unit(rng);
        const Ellipsoid e = Ellipsoid::from_focal(p, 0.4);
        const Vec3 x = random_unit(rng);
        const Vec3 point = e.radius(x) * x;
        const Vec3 grad = normalized(point / norm(point) + (point - p) / norm(point - p));
        EXPECT_NEAR(distance(grad, e.normal(x)), 0.0, 1e-12);
        EXPECT_NEAR(norm(point) + norm(point - p), e.major_sum(), 1e-12 * e.major_sum());
        EXPECT_NEAR(e.cosine(x), dot(x, e.normal(x)), 1e-14);
    }
}

TEST(Ellipsoid, CosineLowerBoundInClass)
{
    std::mt19937_64 rng(5);
    for (double delta : {0.3, 0.75, 15.0 / 8.0, 6.0}) {
        const DeltaBound b = DeltaBound::from_delta(delta);
        for (int n = 0; n < 500; ++n) {
            const Vec3 p = random_unit(rng);
            const Ellipsoid e = Ellipsoid::from_focal(p, delta * (1.0 + 3.0 * n / 500.0));
            ASSERT_LE(e.eccentricity(), b.c + 1e-15);
            const Vec3 x = random_unit(rng);
            EXPECT_GE(e.cosine(x), b.min_cosine() - 1e-14);
        }
    }
}

TEST(Paraboloid, RadiusExamples)
{
    const Vec3 m{0.0, 0.0, 1.0};
    EXPECT_NEAR(Paraboloid(m, 1.0).radius(-m), 0.5, 1e-15);
    EXPECT_NEAR(Paraboloid(m, 1.0).radius({1.0, 0.0, 0.0}), 1.0, 1e-15);
    EXPECT_NEAR(Paraboloid(m, 2.0).radius(normalized(Vec3{std::sqrt(3.0), 0.0, 1.0})), 4.0, 1e-14);
}

TEST(Paraboloid, DegenerateDirection)
{
    const Paraboloid p({0.0, 0.0, 2.0}, 1.0);
    try {
        p.radius({0.0, 0.0, 1.0});
        FAIL() << "expected degenerate-direction";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateDirection);
    }
    EXPECT_THROW(p.normal({0.0, 0.0, 1.0}), Error);
}

TEST(Paraboloid, NormalExamples)
{
    const Vec3 m{0.0, 0.0, 1.0};
    const Paraboloid p(m, 1.0);
    EXPECT_NEAR(distance(p.normal(-m), -m), 0.0, 1e-15);
    const Vec3 side = p.normal({1.0, 0.0, 0.0});
    EXPECT_NEAR(side.x, 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(side.z, -1.0 / std::sqrt(2.0), 1e-15);
    const Vec3 x = normalized(Vec3{0.2, -0.4, 0.1});
    EXPECT_NEAR(p.cosine(x), dot(x, p.normal(x)), 1e-15);
}

TEST(Paraboloid, ReflectsEveryRayAlongAxis)
{
    std::mt19937_64 rng(11);
    for (int n = 0; n < 2000; ++n) {
        const Vec3 m = random_unit(rng);
        const Paraboloid p(m, 0.7);
        Vec3 x = random_unit(rng);
        if (dot(x, m) > 0.99)
            continue;
        const Vec3 y = reflect_direction(x, p.normal(x));
        EXPECT_NEAR(distance(y, m), 0.0, 1e-12);
    }
}

TEST(Paraboloid, FarFieldBounds)
{
    const double delta = 0.5;
    const RadiusBounds b = radius_bounds(Paraboloid({0.0, 0.0, 1.0}, 1.0), delta);
    EXPECT_DOUBLE_EQ(b.lower, 0.5);
    EXPECT_DOUBLE_EQ(b.upper, 2.0);
    EXPECT_THROW(radius_bounds(Paraboloid({0.0, 0.0, 1.0}, 1.0), 1.5), Error);
    std::mt19937_64 rng(2);
    const Paraboloid p({0.0, 0.0, 1.0}, 1.0);
    for (int n = 0; n < 1000; ++n) {
        const Vec3 x = random_unit(rng);
        if (x.z > 1.0 - delta)
            continue;
        EXPECT_GE(p.radius(x), b.lower - 1e-15);
        EXPECT_LE(p.radius(x), b.upper + 1e-15);
        EXPECT_GE(p.cosine(x), delta / 2.0 - 1e-15);
    }
}

TEST(Reflection, Examples)
{
    const Vec3 e1{1, 0, 0}, e3{0, 0, 1};
    EXPECT_NEAR(distance(reflect_direction(e3, e3), -e3), 0.0, 1e-15);
    EXPECT_NEAR(distance(reflect_direction(e1, e3), e1), 0.0, 1e-15);
    EXPECT_NEAR(distance(reflect_direction(e3, normalized(e1 + e3)), -e1), 0.0, 1e-15);
}

TEST(Reflection, PreservesLengthAndFlipsNormalComponent)
{
    std::mt19937_64 rng(7);
    for (int n = 0; n < 10000; ++n) {
        const Vec3 x = random_unit(rng), nu = random_unit(rng);
        const Vec3 y = reflect_direction(x, nu);
        EXPECT_NEAR(norm(y), 1.0, 1e-14);
        EXPECT_NEAR(dot(y, nu), -dot(x, nu), 1e-14);
    }
}

TEST(FocusProperty, Examples)
{
    const Ellipsoid e = Ellipsoid::from_focal({0.0, 0.0, 1.0}, 0.75);
    EXPECT_NEAR(e.eccentricity(), 0.5, 1e-15);
    EXPECT_LE(verify_focus_property(e, {1.0, 0.0, 0.0}), 1e-12);
    EXPECT_LE(verify_focus_property(e, {0.0, 0.0, 1.0}), 1e-15);
}

TEST(FocusProperty, RandomSweep)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> log_ratio(-3.0, 3.0);
    for (int n = 0; n < 1000; ++n) {
        const Vec3 p = std::exp(log_ratio(rng)) * random_unit(rng);
        const Ellipsoid e = Ellipsoid::from_focal(p, norm(p) * std::pow(10.0, log_ratio(rng) / 3.0));
        EXPECT_LE(verify_focus_property(e, random_unit(rng)), 1e-9 * norm(p));
    }
}

TEST(CDelta, Examples)
{
    EXPECT_NEAR(c_delta(15.0 / 8.0), 0.25, 1e-15);
    EXPECT_NEAR(c_delta(0.75), 0.5, 1e-15);
    EXPECT_NEAR(c_delta(1e-12), 1.0, 1e-11);
    EXPECT_THROW(c_delta(0.0), Error);
    double prev = 1.0;
    for (double delta = 1e-3; delta < 1e3; delta *= 1.5) {
        const double c = c_delta(delta);
        EXPECT_GT(c, 0.0);
        EXPECT_LT(c, prev);
        EXPECT_NEAR(c, -delta + std::sqrt(1.0 + delta * delta), 1e-12);
        prev = c;
    }
}

TEST(RadiusBounds, NearExampleAndSweep)
{
    const Ellipsoid e = Ellipsoid::from_focal({0.0, 0.0, 1.0}, 1.0);
    const RadiusBounds b = radius_bounds(e, 0.75);
    EXPECT_NEAR(b.lower, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(b.upper, 2.0, 1e-15);
    try {
        radius_bounds(e, 2.0);
        FAIL() << "expected constraint-violated";
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::ConstraintViolated);
    }
    std::mt19937_64 rng(17);
    for (int n = 0; n < 1000; ++n) {
        const Vec3 p = random_unit(rng);
        const Ellipsoid q = Ellipsoid::from_focal(p, 0.75 + n * 1e-3);
        const RadiusBounds qb = radius_bounds(q, 0.75);
        const double rho = q.radius(random_unit(rng));
        EXPECT_GE(rho, qb.lower * (1.0 - 1e-14));
        EXPECT_LE(rho, qb.upper * (1.0 + 1e-14));
    }
}

TEST(RadiusBounds, HarnackEqualityCase)
{
    // eps = c_delta: max/min radius equals (1 + c)/(1 - c).
    const Ellipsoid e = Ellipsoid::from_focal({0.0, 0.0, 4.0 / 3.0}, 1.0);
    EXPECT_NEAR(e.eccentricity(), 0.5, 1e-15);
    const Vec3 m{0.0, 0.0, 1.0};
    EXPECT_NEAR(e.radius(m) / e.radius(-m), DeltaBound::from_delta(0.75).ratio(), 1e-14);
}
