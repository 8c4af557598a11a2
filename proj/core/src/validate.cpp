#include "lumen/validate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lumen/error.hpp"
#include "lumen/geometry.hpp"
#include "lumen/parallel.hpp"
#include "lumen/summation.hpp"

namespace lumen {

double counter_uniform(std::uint64_t seed, std::uint64_t counter)
{
    std::uint64_t z = seed * 0xD1B54A32D192ED03ull + counter * 0x9E3779B97F4A7C15ull + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

Vec3 sample_cap(const CapDomain& cap, double u1, double u2)
{
    const double cos_theta = 1.0 - u1 * (1.0 - std::cos(cap.half_angle));
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    const double phi = 2.0 * std::numbers::pi * u2;
    const Vec3 e1 = any_orthogonal(cap.center);
    const Vec3 e2 = cross(cap.center, e1);
    return normalized(sin_theta * std::cos(phi) * e1 + sin_theta * std::sin(phi) * e2 + cos_theta * cap.center);
}

namespace {

constexpr std::size_t kChunk = 4096;

struct ChunkTally
{
    std::vector<CompensatedSum> sum;
    std::vector<CompensatedSum> sum_sq;
    std::vector<double> miss;
    CompensatedSum total;
    std::size_t accepted = 0;
    std::size_t unmatched = 0;
};

} // namespace

RayTraceResult raytrace(const Reflector& r, const Domain& domain, const IntensityField& f, const WeightModel& F,
                        double max_distance, const RayTraceOptions& options)
{
    require(options.rays > 0, ErrorCode::InvalidArgument, "raytrace: ray count must be positive");
    require(max_distance > 0.0, ErrorCode::InvalidArgument, "raytrace: M must be positive");
    const CapDomain cap = domain.bounding_cap();
    const double cap_area = 2.0 * std::numbers::pi * (1.0 - std::cos(cap.half_angle));
    const double f_max = f.upper_bound();
    const double scale = cap_area * f_max;
    const std::size_t atoms = r.size();
    const bool near = r.kind() == ReflectorKind::Near;
    const double match_dist = options.match_tol * max_distance;

    const std::size_t chunks = (options.rays + kChunk - 1) / kChunk;
    std::vector<ChunkTally> tallies(chunks);
    parallel_for(options.rays, [&](std::size_t begin, std::size_t end) {
        ChunkTally& t = tallies[begin / kChunk];
        t.sum.resize(atoms);
        t.sum_sq.resize(atoms);
        t.miss.assign(atoms, 0.0);
        for (std::size_t n = begin; n < end; ++n) {
            const Vec3 x = sample_cap(cap, counter_uniform(options.seed, 3 * n),
                                      counter_uniform(options.seed, 3 * n + 1));
            if (!domain.contains(x))
                continue;
            const double fx = f(x);
            if (counter_uniform(options.seed, 3 * n + 2) * f_max >= fx)
                continue;
            ++t.accepted;
            const EnvelopePoint p = r.radius(x);
            const Vec3 normal = r.atom_normal(p.winner, x);
            const Vec3 hit = p.rho * x;
            const Vec3 out = reflect_direction(x, normal);
            auto reaches = [&](std::size_t i, double& miss) {
                if (near) {
                    miss = ray_point_distance(hit, out, r.target(i));
                    return miss <= match_dist;
                }
                miss = 1.0 - dot(out, r.target(i));
                return miss <= options.direction_tol;
            };
            double miss = 0.0;
            std::size_t matched = atoms;
            if (reaches(p.winner, miss))
                matched = p.winner;
            if (!p.tie)
                t.miss[p.winner] = std::max(t.miss[p.winner], miss);
            for (std::size_t i = 0; i < atoms && matched == atoms; ++i) {
                double other = 0.0;
                if (i != p.winner && reaches(i, other))
                    matched = i;
            }
            if (matched == atoms) {
                ++t.unmatched;
                continue;
            }
            const double z = scale * F(r.atom_cosine(p.winner, x), p.rho);
            t.sum[matched].add(z);
            t.sum_sq[matched].add(z * z);
            t.total.add(z);
        }
    });

    RayTraceResult out;
    out.rays = options.rays;
    out.totals.assign(atoms, 0.0);
    out.standard_error.assign(atoms, 0.0);
    out.focus_miss.assign(atoms, 0.0);
    std::vector<CompensatedSum> sum(atoms), sum_sq(atoms);
    CompensatedSum total;
    for (const ChunkTally& t : tallies) {
        out.accepted += t.accepted;
        out.unmatched += t.unmatched;
        total.add(t.total.value());
        for (std::size_t i = 0; i < atoms; ++i) {
            sum[i].add(t.sum[i].value());
            sum_sq[i].add(t.sum_sq[i].value());
            out.focus_miss[i] = std::max(out.focus_miss[i], t.miss[i]);
        }
    }
    const double n = static_cast<double>(options.rays);
    for (std::size_t i = 0; i < atoms; ++i) {
        const double mean = sum[i].value() / n;
        const double var = std::max(0.0, sum_sq[i].value() / n - mean * mean) * n / std::max(1.0, n - 1.0);
        out.totals[i] = mean;
        out.standard_error[i] = std::sqrt(var / n);
    }
    out.traced_flux = total.value() / n;
    if (out.accepted > 0 &&
        static_cast<double>(out.unmatched) > options.max_unmatched_fraction * static_cast<double>(out.accepted))
        fail(ErrorCode::Accounting, "raytrace: " + std::to_string(out.unmatched) + " of " +
                                        std::to_string(out.accepted) + " rays matched no atom");
    return out;
}

namespace {

struct ChartImage
{
    bool valid = false;
    double u = 0.0, v = 0.0;
};

ChartImage chart_image(const Reflector& r, const PlanarPatch& patch, double a, double b)
{
    const double s = 1.0 - a * a - b * b;
    if (!(s > 0.0))
        return {};
    const Vec3 x{a, b, std::sqrt(s)};
    const EnvelopePoint p = r.radius(x);
    const Vec3 out = reflect_direction(x, r.atom_normal(p.winner, x));
    const Vec3 hit = p.rho * x;
    const double denom = dot(out, patch.normal());
    if (denom == 0.0)
        return {};
    const double t = dot(patch.origin() - hit, patch.normal()) / denom;
    if (!(t > 0.0))
        return {};
    const auto [u, v] = patch.coordinates(hit + t * out);
    return {true, u, v};
}

} // namespace

TransportCheck transport_residual(const Reflector& r, const Domain& domain, const IntensityField& f,
                                  const PlanarPatch& patch, const std::function<double(double, double)>& g,
                                  const TransportOptions& options)
{
    require(r.kind() == ReflectorKind::Near, ErrorCode::InvalidArgument,
            "transport_residual: near-field reflectors only");
    require(options.h > 0.0 && options.samples > 0, ErrorCode::InvalidArgument,
            "transport_residual: h and sample count must be positive");
    const CapDomain cap = domain.bounding_cap();
    const double h = options.h;
    TransportCheck out;
    out.requested = options.samples;
    out.h = h;
    const std::size_t max_proposals = 200 * options.samples;
    std::size_t drawn = 0;
    for (std::size_t proposal = 0; drawn < options.samples && proposal < max_proposals; ++proposal) {
        const Vec3 x = sample_cap(cap, counter_uniform(options.seed, 2 * proposal),
                                  counter_uniform(options.seed, 2 * proposal + 1));
        if (x.z <= 0.0 || !domain.contains(x))
            continue;
        ++drawn;
        const double a = x.x, b = x.y;
        const double ra = std::abs(a) + 3.0 * h, rb = std::abs(b) + 3.0 * h;
        if (ra * ra + rb * rb >= 1.0) {
            ++out.skipped_invalid;
            continue;
        }
        const EnvelopePoint center = r.radius(x);
        bool smooth = !center.tie;
        for (int da = -1; da <= 1 && smooth; ++da)
            for (int db = -1; db <= 1 && smooth; ++db) {
                if (da == 0 && db == 0)
                    continue;
                const double pa = a + 3.0 * h * da, pb = b + 3.0 * h * db;
                const EnvelopePoint q = r.radius({pa, pb, std::sqrt(1.0 - pa * pa - pb * pb)});
                smooth = !q.tie && q.winner == center.winner;
            }
        if (!smooth) {
            ++out.skipped_tie;
            continue;
        }
        const ChartImage t0 = chart_image(r, patch, a, b);
        const ChartImage ap = chart_image(r, patch, a + h, b), am = chart_image(r, patch, a - h, b);
        const ChartImage bp = chart_image(r, patch, a, b + h), bm = chart_image(r, patch, a, b - h);
        if (!(t0.valid && ap.valid && am.valid && bp.valid && bm.valid)) {
            ++out.skipped_invalid;
            continue;
        }
        const double du_da = (ap.u - am.u) / (2.0 * h), dv_da = (ap.v - am.v) / (2.0 * h);
        const double du_db = (bp.u - bm.u) / (2.0 * h), dv_db = (bp.v - bm.v) / (2.0 * h);
        const double lhs = std::abs(du_da * dv_db - du_db * dv_da);
        ++out.evaluated;
        const double gval = g(t0.u, t0.v);
        if (!(gval > 0.0))
            continue; // the right-hand side is unbounded
        const double cosine = r.atom_cosine(center.winner, x);
        const double rhs = f(x) * cosine / (x.z * center.rho * center.rho * gval);
        const double rel = (lhs - rhs) / rhs;
        out.max_rel_residual = std::max(out.max_rel_residual, std::abs(rel));
        out.max_violation = std::max(out.max_violation, rel);
        if (lhs > rhs * (1.0 + options.tolerance_scale * h))
            ++out.violations;
    }
    return out;
}

TransportCheck transport_residual(const Reflector& r, const Domain& domain, const IntensityField& f,
                                  const PlanarTarget& target, const TransportOptions& options)
{
    const PlanarDensity& density = target.density;
    const Rect e = target.patch.extent();
    auto g = [&density, e](double u, double v) {
        if (u < e.u0 || u > e.u1 || v < e.v0 || v > e.v1)
            return 0.0;
        return density(u, v);
    };
    return transport_residual(r, domain, f, target.patch, g, options);
}

ConstantWeightComparison compare_constant_weight(const SphericalGrid& grid, const SampledIntensity& f,
                                                 const TargetMeasure& target, const SolverConfig& config)
{
    require(target.kind() == TargetKind::Points, ErrorCode::InvalidArgument,
            "compare_constant_weight: near-field targets only");
    const DeltaBound b = DeltaBound::from_delta(config.delta);
    const double k = b.ratio();
    const double m = target.max_distance();
    const double c = feasibility_constant(config.delta, k, m);
    const double eta = target.total_mass();
    require(std::abs(f.total_flux - eta / c) <= 1e-6 * f.total_flux, ErrorCode::InvalidArgument,
            "compare_constant_weight: calibration requires the integral of f (" + std::to_string(f.total_flux) +
                ") to equal eta(D) / C (" + std::to_string(eta / c) + ")");

    std::vector<double> scaled = target.masses();
    for (double& g : scaled)
        g /= c;
    const TargetMeasure classical = TargetMeasure::points(target.locations(), scaled, 0, m);
    SolverConfig cfg = config;
    cfg.k = k;
    cfg.weight = WeightModel::constant();

    ConstantWeightComparison out;
    // The calibration is an equality, so the energy check is skipped here:
    // it would reject rounding-level deficits.
    out.constant_solve = DiscreteSolver(grid, f, classical, cfg).solve();
    out.mu_star = reflector_measure(out.constant_solve.reflector, grid, f, WeightModel::inverse_square()).per_atom;
    CompensatedSum mu_e, eta_e;
    for (std::size_t i = 1; i < target.size(); ++i) {
        mu_e.add(out.mu_star[i]);
        eta_e.add(target.atom(i).mass);
    }
    out.mu_star_e = mu_e.value();
    out.eta_e = eta_e.value();
    out.gap = out.mu_star_e - out.eta_e;
    const double r2 = k * k;
    out.factor = r2 * r2 * k - 1.0;
    out.bound = out.factor * eta;
    return out;
}

ObstructionResult obstruction_raycheck(const Reflector& r, const Domain& domain, std::size_t samples,
                                       std::uint64_t seed, std::size_t steps)
{
    require(r.kind() == ReflectorKind::Near, ErrorCode::InvalidArgument,
            "obstruction_raycheck: near-field reflectors only");
    require(steps >= 1, ErrorCode::InvalidArgument, "obstruction_raycheck: steps must be positive");
    const CapDomain cap = domain.bounding_cap();
    ObstructionResult out;
    const std::size_t max_proposals = 200 * samples;
    for (std::size_t proposal = 0; out.samples < samples && proposal < max_proposals; ++proposal) {
        const Vec3 x = sample_cap(cap, counter_uniform(seed, 2 * proposal), counter_uniform(seed, 2 * proposal + 1));
        if (!domain.contains(x))
            continue;
        ++out.samples;
        const EnvelopePoint p = r.radius(x);
        const Vec3 start = p.rho * x;
        const Vec3 focus = r.target(p.winner);
        bool blocked = false;
        for (std::size_t s = 1; s <= steps; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(steps);
            const Vec3 y = start + t * (focus - start);
            const double len = norm(y);
            if (len == 0.0)
                continue;
            const Vec3 dir = y / len;
            if (!domain.contains(dir))
                continue;
            const double excess = len / r.radius(dir).rho - 1.0;
            if (excess > 1e-9) {
                blocked = true;
                out.max_excess = std::max(out.max_excess, excess);
            }
        }
        if (blocked)
            ++out.violations;
    }
    return out;
}

} // namespace lumen
