#include "lumen/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lumen/error.hpp"
#include "lumen/geometry.hpp"
#include "lumen/parallel.hpp"
#include "lumen/summation.hpp"

namespace lumen {

namespace {

void check_focal(const std::vector<Vec3>& where, const std::vector<double>& d)
{
    require(!where.empty(), ErrorCode::InvalidArgument, "reflector: no atoms");
    require(where.size() == d.size(), ErrorCode::InvalidArgument, "reflector: one focal parameter per atom");
    for (std::size_t i = 0; i < d.size(); ++i) {
        require(std::isfinite(d[i]) && d[i] > 0.0, ErrorCode::InvalidArgument,
                "reflector: focal parameter " + std::to_string(i) + " must be positive");
        require(norm(where[i]) > 0.0, ErrorCode::InvalidArgument,
                "reflector: target " + std::to_string(i) + " is at the origin");
    }
}

} // namespace

Reflector Reflector::near(const std::vector<Vec3>& foci, const std::vector<double>& focal_params)
{
    check_focal(foci, focal_params);
    Reflector r;
    r.kind_ = ReflectorKind::Near;
    r.target_ = foci;
    r.d_ = focal_params;
    for (std::size_t i = 0; i < foci.size(); ++i) {
        r.axis_.push_back(normalized(foci[i]));
        r.eps_.push_back(eccentricity_from_focal(focal_params[i], norm(foci[i])));
    }
    return r;
}

Reflector Reflector::far(const std::vector<Vec3>& axes, const std::vector<double>& focal_params)
{
    check_focal(axes, focal_params);
    Reflector r;
    r.kind_ = ReflectorKind::Far;
    r.d_ = focal_params;
    for (const Vec3& a : axes) {
        r.axis_.push_back(normalized(a));
        r.target_.push_back(r.axis_.back());
        r.eps_.push_back(1.0);
    }
    return r;
}

Reflector Reflector::with_focal(const std::vector<double>& focal_params) const
{
    return kind_ == ReflectorKind::Near ? near(target_, focal_params) : far(axis_, focal_params);
}

EnvelopePoint Reflector::radius(const Vec3& x) const
{
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    std::size_t winner = 0;
    for (std::size_t i = 0; i < d_.size(); ++i) {
        const double rho = atom_radius(i, x);
        if (rho < best) {
            second = best;
            best = rho;
            winner = i;
        } else if (rho < second) {
            second = rho;
        }
    }
    return {best, winner, second - best <= kTieTolerance * best};
}

RegionAssignment assign_regions(const Reflector& r, const SphericalGrid& grid)
{
    const auto nodes = grid.nodes();
    RegionAssignment out;
    out.winner.resize(nodes.size());
    out.tie.resize(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const EnvelopePoint p = r.radius(nodes[j]);
            out.winner[j] = static_cast<std::uint32_t>(p.winner);
            out.tie[j] = p.tie ? 1 : 0;
        }
    });
    out.counts.assign(r.size(), 0);
    std::size_t ties = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        ++out.counts[out.winner[j]];
        ties += out.tie[j] ? 1 : 0;
    }
    out.tie_fraction = nodes.empty() ? 0.0 : static_cast<double>(ties) / static_cast<double>(nodes.size());
    return out;
}

WeightModel WeightModel::inverse_square()
{
    WeightModel w;
    w.kind_ = Kind::InverseSquare;
    w.name_ = "inverse-square";
    return w;
}

WeightModel WeightModel::constant()
{
    WeightModel w;
    w.kind_ = Kind::Constant;
    w.name_ = "constant";
    return w;
}

WeightModel WeightModel::custom(std::function<double(double, double)> fn, std::string name)
{
    require(static_cast<bool>(fn), ErrorCode::InvalidArgument, "weight model: empty function");
    WeightModel w;
    w.kind_ = Kind::Custom;
    w.fn_ = std::move(fn);
    w.name_ = std::move(name);
    return w;
}

double WeightModel::min_over(double u_lo, double u_hi, double v_lo, double v_hi) const
{
    switch (kind_) {
    case Kind::InverseSquare:
        return u_lo / (v_hi * v_hi);
    case Kind::Constant:
        return 1.0;
    case Kind::Custom:
        break;
    }
    double best = std::numeric_limits<double>::infinity();
    constexpr int n = 64;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double u = u_lo + (u_hi - u_lo) * a / (n - 1.0);
            const double v = v_lo + (v_hi - v_lo) * b / (n - 1.0);
            best = std::min(best, fn_(u, v));
        }
    return best;
}

void WeightModel::validate_on(double u_lo, double u_hi, double v_lo, double v_hi) const
{
    require(u_lo > 0.0 && u_hi >= u_lo && v_lo > 0.0 && v_hi >= v_lo, ErrorCode::InvalidArgument,
            "weight model: invalid validation box");
    if (kind_ != Kind::Custom)
        return;
    constexpr int n = 64;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double u = u_lo + (u_hi - u_lo) * a / (n - 1.0);
            const double v = v_lo + (v_hi - v_lo) * b / (n - 1.0);
            const double value = fn_(u, v);
            require(std::isfinite(value) && value > 0.0, ErrorCode::InvalidArgument,
                    "weight model '" + name_ + "' is not positive at (u=" + std::to_string(u) +
                        ", v=" + std::to_string(v) + ")");
        }
}

namespace {

// Per-node contribution weight * f * F and its winner.
void node_terms(const Reflector& r, const SphericalGrid& grid, const SampledIntensity& f, const WeightModel& F,
                std::vector<double>& terms, std::vector<std::uint32_t>* winners)
{
    require(f.values.size() == grid.size(), ErrorCode::InvalidArgument,
            "measure: intensity samples do not match the grid");
    const auto nodes = grid.nodes();
    const auto weights = grid.weights();
    terms.resize(nodes.size());
    if (winners)
        winners->resize(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const EnvelopePoint p = r.radius(nodes[j]);
            terms[j] = weights[j] * f.values[j] * F(r.atom_cosine(p.winner, nodes[j]), p.rho);
            if (winners)
                (*winners)[j] = static_cast<std::uint32_t>(p.winner);
        }
    });
    for (std::size_t j = 0; j < terms.size(); ++j)
        if (!std::isfinite(terms[j]))
            throw NumericError("measure: non-finite integrand at node " + std::to_string(j), j);
}

} // namespace

MeasureVector reflector_measure(const Reflector& r, const SphericalGrid& grid, const SampledIntensity& f,
                                const WeightModel& F)
{
    std::vector<double> terms;
    std::vector<std::uint32_t> winners;
    node_terms(r, grid, f, F, terms, &winners);
    std::vector<CompensatedSum> per(r.size());
    CompensatedSum total;
    for (std::size_t j = 0; j < terms.size(); ++j) {
        per[winners[j]].add(terms[j]);
        total.add(terms[j]);
    }
    MeasureVector out;
    out.per_atom.reserve(per.size());
    for (const auto& s : per)
        out.per_atom.push_back(s.value());
    out.total = total.value();
    return out;
}

double weighted_flux(const Reflector& r, const SphericalGrid& grid, const SampledIntensity& f,
                     const WeightModel& F)
{
    const auto nodes = grid.nodes();
    std::vector<double> integrand(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const EnvelopePoint p = r.radius(nodes[j]);
        integrand[j] = f.values[j] * F(r.atom_cosine(p.winner, nodes[j]), p.rho);
    }
    return integrate(grid, integrand);
}

RegularityReport regularity_report(const Reflector& r, const SphericalGrid& grid)
{
    const auto nodes = grid.nodes();
    std::vector<double> rho(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j)
            rho[j] = r.radius(nodes[j]).rho;
    });
    RegularityReport out;
    const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
    out.min_rho = *lo;
    out.max_rho = *hi;
    out.harnack_ratio = out.max_rho / out.min_rho;
    for (const auto& e : grid.edges()) {
        const double chord = distance(nodes[e[0]], nodes[e[1]]);
        if (chord > 0.0)
            out.lipschitz_est = std::max(out.lipschitz_est, std::abs(rho[e[0]] - rho[e[1]]) / chord);
    }
    return out;
}

double lipschitz_bound(double delta, double max_distance)
{
    return 0.5 * max_distance * DeltaBound::from_delta(delta).ratio();
}

double harnack_bound(double delta) { return DeltaBound::from_delta(delta).ratio(); }

} // namespace lumen
