#include "lumen/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "lumen/error.hpp"
#include "lumen/geometry.hpp"
#include "lumen/summation.hpp"

namespace lumen {

double lower_bound_constant(double delta, double delta_prime, double max_distance)
{
    require(delta > 0.0 && delta_prime > 0.0 && max_distance > 0.0, ErrorCode::InvalidArgument,
            "lower_bound_constant: arguments must be positive");
    const double c = c_delta(delta);
    const double top = delta_prime * max_distance;
    return (1.0 - c) * (1.0 - c) * (1.0 - c) / ((1.0 + c) * top * top);
}

double feasibility_constant(double delta, double k, double max_distance)
{
    require(delta > 0.0 && max_distance > 0.0, ErrorCode::InvalidArgument,
            "feasibility_constant: delta and M must be positive");
    const double ratio = DeltaBound::from_delta(delta).ratio();
    require(k >= ratio * (1.0 - 1e-12), ErrorCode::InvalidArgument,
            "feasibility_constant: k = " + std::to_string(k) + " is below (1 + c)/(1 - c) = " +
                std::to_string(ratio));
    return lower_bound_constant(delta, k * delta, max_distance);
}

double feasibility_constant_far(double a_prime, double delta)
{
    require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument,
            "feasibility_constant_far: delta must lie in (0, 1)");
    require(a_prime > 0.0, ErrorCode::InvalidArgument, "feasibility_constant_far: a' must be positive");
    return delta * delta * delta / (2.0 * a_prime * a_prime);
}

namespace {

bool is_far(const TargetMeasure& target) { return target.kind() == TargetKind::Directions; }

struct Box
{
    double u_lo, u_hi, v_lo, v_hi;
};

// Admissible (x.nu, rho) range for the configured class.
Box admissible_box(const TargetMeasure& target, const SolverConfig& config)
{
    if (is_far(target))
        return {config.delta / 2.0, 1.0, config.a, config.a_prime / config.delta};
    const DeltaBound b = DeltaBound::from_delta(config.delta);
    const double m = target.max_distance();
    return {b.min_cosine(), 1.0, config.delta * m / (1.0 + b.c), config.k * config.delta * m / (1.0 - b.c)};
}

void validate_config(const TargetMeasure& target, const SolverConfig& config)
{
    require(config.residual_tol > 0.0 && config.bisection_tol > 0.0 && config.polish_tol > 0.0,
            ErrorCode::InvalidArgument, "solver: tolerances must be positive");
    require(config.max_sweeps >= 1, ErrorCode::InvalidArgument, "solver: max_sweeps must be at least 1");
    require(config.max_polish_sweeps >= 0, ErrorCode::InvalidArgument, "solver: max_polish_sweeps must be nonnegative");
    require(config.start_factor > 1.0, ErrorCode::InvalidArgument, "solver: start_factor must exceed 1");
    if (is_far(target)) {
        require(config.delta > 0.0 && config.delta < 1.0, ErrorCode::InvalidArgument,
                "solver: far-field delta must lie in (0, 1)");
        require(config.a > 0.0, ErrorCode::InvalidArgument, "solver: a must be positive");
        require(config.a_prime >= 4.0 * config.a / config.delta * (1.0 - 1e-12), ErrorCode::InvalidArgument,
                "solver: a' must be at least 4a / delta");
    } else {
        require(config.delta > 0.0, ErrorCode::InvalidArgument, "solver: delta must be positive");
        const double ratio = DeltaBound::from_delta(config.delta).ratio();
        require(config.k >= ratio * (1.0 - 1e-12), ErrorCode::InvalidArgument,
                "solver: k must be at least (1 + c)/(1 - c) = " + std::to_string(ratio));
    }
}

} // namespace

EnergyCheck check_energy_condition(const SampledIntensity& f, const TargetMeasure& target,
                                   const SolverConfig& config)
{
    validate_config(target, config);
    EnergyCheck out;
    out.total_flux = f.total_flux;
    out.target_mass = target.total_mass();
    if (config.weight.is_inverse_square()) {
        out.constant = is_far(target) ? feasibility_constant_far(config.a_prime, config.delta)
                                      : feasibility_constant(config.delta, config.k, target.max_distance());
    } else {
        const Box b = admissible_box(target, config);
        out.constant = config.weight.min_over(b.u_lo, b.u_hi, b.v_lo, b.v_hi);
    }
    out.margin = out.total_flux - out.target_mass / out.constant;
    out.feasible = out.margin >= -1e-12 * out.total_flux;
    return out;
}

DiscreteSolver::DiscreteSolver(const SphericalGrid& grid, const SampledIntensity& f, const TargetMeasure& target,
                               const SolverConfig& config, std::optional<std::vector<double>> initial)
    : grid_(grid), f_(f), target_(target), config_(config)
{
    validate_config(target, config);
    require(f.values.size() == grid.size(), ErrorCode::InvalidArgument,
            "solver: intensity samples do not match the grid");
    far_ = is_far(target);
    atoms_ = target.size();
    nodes_ = grid.size();
    const auto nodes = grid.nodes();
    const auto weights = grid.weights();

    double first = 0.0, start = 0.0;
    if (far_) {
        scale_ = config.a_prime;
        floor_ = 2.0 * config.a;
        first = config.a_prime;
        start = config.start_factor * 2.0 * config.a_prime / config.delta;
    } else {
        const double m = target.max_distance();
        scale_ = m;
        floor_ = config.delta * m;
        first = config.k * config.delta * m;
        start = config.start_factor * config.k * DeltaBound::from_delta(config.delta).ratio() * config.delta * m;
    }

    const Box box = admissible_box(target, config);
    config.weight.validate_on(box.u_lo, box.u_hi, box.v_lo, box.v_hi);

    for (const Atom& a : target.atoms()) {
        g_.push_back(a.mass);
        op_.push_back(norm(a.location));
    }
    dots_.resize(atoms_ * nodes_);
    for (std::size_t i = 0; i < atoms_; ++i) {
        const Vec3 m = normalized(target.atom(i).location);
        for (std::size_t j = 0; j < nodes_; ++j) {
            const double t = dot(nodes[j], m);
            if (far_ && t > 1.0 - config.delta + 1e-12)
                fail(ErrorCode::ConstraintViolated,
                     "solver: aperture direction " + std::to_string(j) + " violates x.m <= 1 - delta for atom " +
                         std::to_string(target.atom(i).source_index));
            dots_[i * nodes_ + j] = t;
        }
    }
    wf_.resize(nodes_);
    for (std::size_t j = 0; j < nodes_; ++j)
        wf_[j] = weights[j] * f.values[j];

    if (initial) {
        require(initial->size() == atoms_, ErrorCode::InvalidArgument, "solver: warm start size mismatch");
        d_ = *initial;
        for (double& d : d_)
            require(std::isfinite(d) && d >= floor_ * (1.0 - 1e-12), ErrorCode::InvalidArgument,
                    "solver: warm start below the floor");
    } else {
        d_.assign(atoms_, start);
    }
    d_[0] = first;
    eps_.resize(atoms_);
    for (std::size_t i = 0; i < atoms_; ++i)
        eps_[i] = eccentricity(i, d_[i]);

    best_.resize(nodes_);
    second_.resize(nodes_);
    best_rho_.resize(nodes_);
    second_rho_.resize(nodes_);
    for (std::size_t j = 0; j < nodes_; ++j)
        rebuild_node(j);
}

double DiscreteSolver::eccentricity(std::size_t i, double d) const
{
    return far_ ? 1.0 : eccentricity_from_focal(d, op_[i]);
}

namespace {

// Least index wins exact ties, matching Reflector::radius.
inline bool beats(double rho_a, std::size_t a, double rho_b, std::size_t b)
{
    return rho_a < rho_b || (rho_a == rho_b && a < b);
}

inline double cosine(double eps, double t)
{
    return (1.0 - eps * t) / std::sqrt(std::max(0.0, 1.0 - 2.0 * eps * t + eps * eps));
}

} // namespace

void DiscreteSolver::rebuild_node(std::size_t j)
{
    double b = INFINITY, s = INFINITY;
    std::uint32_t bi = 0, si = 0;
    for (std::size_t i = 0; i < atoms_; ++i) {
        const double r = rho(i, j, d_[i], eps_[i]);
        if (beats(r, i, b, bi) || i == 0) {
            if (i > 0) {
                s = b;
                si = bi;
            }
            b = r;
            bi = static_cast<std::uint32_t>(i);
        } else if (s == INFINITY || beats(r, i, s, si)) {
            s = r;
            si = static_cast<std::uint32_t>(i);
        }
    }
    best_[j] = bi;
    best_rho_[j] = b;
    second_[j] = si;
    second_rho_[j] = s;
}

double DiscreteSolver::atom_measure(std::size_t i, double d, std::span<const std::uint32_t> candidates,
                                    std::span<const double> other_rho, std::span<const std::uint32_t> other_idx,
                                    std::vector<std::uint32_t>* winners) const
{
    const double eps = eccentricity(i, d);
    const double* t = &dots_[i * nodes_];
    CompensatedSum sum;
    if (winners)
        winners->clear();
    for (std::uint32_t j : candidates) {
        const double r = d / (1.0 - eps * t[j]);
        if (!beats(r, i, other_rho[j], other_idx[j]))
            continue;
        sum.add(wf_[j] * config_.weight(cosine(eps, t[j]), r));
        if (winners)
            winners->push_back(j);
    }
    return sum.value();
}

void DiscreteSolver::adjust(std::size_t i)
{
    require(i >= 1 && i < atoms_, ErrorCode::InvalidArgument, "solver: adjust index out of range");
    std::vector<double> other_rho(nodes_);
    std::vector<std::uint32_t> other_idx(nodes_);
    for (std::size_t j = 0; j < nodes_; ++j) {
        if (best_[j] == i) {
            other_rho[j] = second_rho_[j];
            other_idx[j] = second_[j];
        } else {
            other_rho[j] = best_rho_[j];
            other_idx[j] = best_[j];
        }
    }
    std::vector<std::uint32_t> all(nodes_);
    std::iota(all.begin(), all.end(), 0u);

    const double g = g_[i];
    const double cur = d_[i];
    const double width = config_.bisection_tol * scale_;
    std::vector<std::uint32_t> cand, scratch;

    double lo = 0.0, hi = 0.0, mu_lo = 0.0, mu_hi = 0.0;
    const double mu_cur = atom_measure(i, cur, all, other_rho, other_idx, &scratch);
    if (mu_cur > g) {
        // Warm starts can begin above the target: expand upward.
        lo = cur;
        mu_lo = mu_cur;
        cand = scratch;
        double step = width;
        for (;;) {
            hi = lo + step;
            mu_hi = atom_measure(i, hi, cand, other_rho, other_idx, &scratch);
            if (mu_hi <= g)
                break;
            lo = hi;
            mu_lo = mu_hi;
            cand = scratch;
            step *= 2.0;
        }
    } else {
        hi = cur;
        mu_hi = mu_cur;
        double step = width;
        for (;;) {
            lo = std::max(floor_, hi - step);
            mu_lo = atom_measure(i, lo, all, other_rho, other_idx, &cand);
            if (mu_lo > g)
                break;
            if (lo <= floor_) {
                // Lowering d_i cannot help any further: others only shrink this region later.
                if (mu_lo < g * (1.0 - config_.residual_tol))
                    throw FloorError("solver: atom " + std::to_string(target_.atom(i).source_index) +
                                         " reached its floor with relative deficit " +
                                         std::to_string((g - mu_lo) / g),
                                     target_.atom(i).source_index, (g - mu_lo) / g);
                hi = lo;
                mu_hi = mu_lo;
                break;
            }
            hi = lo;
            mu_hi = mu_lo;
            step *= 2.0;
        }
    }

    double result = hi;
    if (hi > lo) {
        while (hi - lo > width * (1.0 + 1e-6)) {
            const double mid = lo + 0.5 * (hi - lo);
            const double mu_mid = atom_measure(i, mid, cand, other_rho, other_idx, &scratch);
            const double slack = 1e-12 * std::max(mu_lo, g);
            if (!(mu_lo + slack >= mu_mid && mu_mid + slack >= mu_hi)) {
                // mu_i is not monotone on this bracket: minimize |mu_i - g| instead.
                ++fallbacks_;
                const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
                double a = lo, b = hi;
                auto miss = [&](double d) {
                    return std::abs(atom_measure(i, d, cand, other_rho, other_idx, nullptr) - g);
                };
                double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
                double f1 = miss(x1), f2 = miss(x2);
                while (b - a > width) {
                    if (f1 <= f2) {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - inv_phi * (b - a);
                        f1 = miss(x1);
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + inv_phi * (b - a);
                        f2 = miss(x2);
                    }
                }
                hi = f1 <= f2 ? x1 : x2;
                break;
            }
            if (mu_mid > g) {
                lo = mid;
                mu_lo = mu_mid;
                cand.swap(scratch);
            } else {
                hi = mid;
                mu_hi = mu_mid;
            }
        }
        result = hi;
    }

    const double old = d_[i];
    d_[i] = result;
    eps_[i] = eccentricity(i, result);
    if (result < old) {
        for (std::size_t j = 0; j < nodes_; ++j) {
            const double r = rho(i, j, result, eps_[i]);
            if (best_[j] == i) {
                best_rho_[j] = r;
            } else if (second_[j] == i) {
                second_rho_[j] = r;
                if (beats(r, i, best_rho_[j], best_[j])) {
                    std::swap(best_[j], second_[j]);
                    std::swap(best_rho_[j], second_rho_[j]);
                }
            } else if (beats(r, i, best_rho_[j], best_[j])) {
                second_[j] = best_[j];
                second_rho_[j] = best_rho_[j];
                best_[j] = static_cast<std::uint32_t>(i);
                best_rho_[j] = r;
            } else if (beats(r, i, second_rho_[j], second_[j])) {
                second_[j] = static_cast<std::uint32_t>(i);
                second_rho_[j] = r;
            }
        }
    } else if (result > old) {
        for (std::size_t j = 0; j < nodes_; ++j)
            if (best_[j] == i || second_[j] == i)
                rebuild_node(j);
    }
}

double DiscreteSolver::sweep(std::span<const std::size_t> order)
{
    double change = 0.0;
    for (std::size_t i : order) {
        if (i == 0)
            continue;
        const double before = d_[i];
        adjust(i);
        change = std::max(change, std::abs(d_[i] - before) / scale_);
    }
    return change;
}

std::vector<double> DiscreteSolver::measures() const
{
    std::vector<CompensatedSum> per(atoms_);
    for (std::size_t j = 0; j < nodes_; ++j) {
        const std::size_t i = best_[j];
        per[i].add(wf_[j] * config_.weight(cosine(eps_[i], dots_[i * nodes_ + j]), best_rho_[j]));
    }
    std::vector<double> out;
    for (const auto& s : per)
        out.push_back(s.value());
    return out;
}

std::vector<double> DiscreteSolver::residuals(const std::vector<double>& mu) const
{
    std::vector<double> out(atoms_, 0.0);
    for (std::size_t i = 1; i < atoms_; ++i)
        out[i] = std::abs(mu[i] - g_[i]) / g_[i];
    return out;
}

SolveReport DiscreteSolver::solve(std::span<const std::size_t> order)
{
    std::vector<std::size_t> default_order;
    if (order.empty()) {
        default_order.resize(atoms_);
        std::iota(default_order.begin(), default_order.end(), std::size_t{0});
        order = default_order;
    }
    SolveReport report;
    double max_res = 0.0;
    if (atoms_ > 1) {
        bool done = false;
        int reached = 0; // first sweep meeting residual_tol
        for (int s = 1; s <= config_.max_sweeps; ++s) {
            const double change = sweep(order);
            const auto res = residuals(measures());
            max_res = *std::max_element(res.begin(), res.end());
            report.residual_trace.push_back(max_res);
            report.sweeps = s;
            if (max_res <= config_.residual_tol && change <= config_.polish_tol) {
                report.polished = true;
                done = true;
                break;
            }
            if (max_res <= config_.residual_tol) {
                if (reached == 0)
                    reached = s;
                if (s - reached >= config_.max_polish_sweeps) {
                    done = true;
                    break;
                }
            }
            if (change == 0.0)
                throw ConvergenceError("solver: iteration stalled with max relative residual " +
                                           std::to_string(max_res) +
                                           "; the grid is too coarse to resolve the smallest targets",
                                       report.residual_trace);
        }
        if (!done && max_res > config_.residual_tol)
            throw ConvergenceError("solver: max relative residual " + std::to_string(max_res) + " after " +
                                       std::to_string(config_.max_sweeps) + " sweeps",
                                   report.residual_trace);
    } else {
        report.polished = true;
    }

    const auto where = target_.locations();
    report.reflector = far_ ? Reflector::far(where, d_) : Reflector::near(where, d_);
    report.targets = g_;
    report.measure = reflector_measure(report.reflector, grid_, f_, config_.weight);
    report.residuals = residuals(report.measure.per_atom);
    report.max_residual = *std::max_element(report.residuals.begin(), report.residuals.end());
    report.overshoot = report.measure.per_atom[0] - g_[0];
    const RegionAssignment regions = assign_regions(report.reflector, grid_);
    report.tie_fraction = regions.tie_fraction;
    report.coverage = static_cast<double>(std::accumulate(regions.counts.begin(), regions.counts.end(),
                                                          std::size_t{0})) /
                      static_cast<double>(nodes_);
    const double total = f_.total_flux;
    report.margin = total - target_.total_mass() / check_energy_condition(f_, target_, config_).constant;
    return report;
}

SolveReport solve_discrete(const SphericalGrid& grid, const SampledIntensity& f, const TargetMeasure& target,
                           const SolverConfig& config)
{
    const EnergyCheck energy = check_energy_condition(f, target, config);
    if (!energy.feasible)
        throw FeasibilityError("solver: energy condition fails, margin " + std::to_string(energy.margin),
                               energy.margin);
    DiscreteSolver solver(grid, f, target, config);
    return solver.solve();
}

namespace {

[[noreturn]] void rethrow_with_level(int level)
{
    const std::string prefix = "level " + std::to_string(level) + ": ";
    try {
        throw;
    } catch (const FeasibilityError& e) {
        throw FeasibilityError(prefix + e.what(), e.margin());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(prefix + e.what(), e.residual_trace());
    } catch (const FloorError& e) {
        throw FloorError(prefix + e.what(), e.atom(), e.residual());
    } catch (const NumericError& e) {
        throw NumericError(prefix + e.what(), e.node());
    } catch (const Error& e) {
        throw Error(e.code(), prefix + e.what());
    }
}

} // namespace

GeneralReport solve_general(const SphericalGrid& grid, const SampledIntensity& f, const PlanarTarget& target,
                            const SolverConfig& config)
{
    target.validate();
    require(config.max_levels >= 0, ErrorCode::InvalidArgument, "solve_general: max_levels must be nonnegative");
    const double eps0 = config.eps0 > 0.0 ? config.eps0 : target.diameter();
    CellPartition partition = CellPartition::initial(target, eps0);

    GeneralReport out{{}, {}, false, partition, TargetMeasure{}};
    const auto nodes = grid.nodes();
    std::vector<double> prev_rho;
    std::vector<double> prev_cell_d; // focal parameter per cell of the previous level

    for (int level = 0; level <= config.max_levels; ++level) {
        TargetMeasure atoms = partition.to_target(target);
        SolveReport report;
        try {
            const EnergyCheck energy = check_energy_condition(f, atoms, config);
            if (!energy.feasible)
                throw FeasibilityError("energy condition fails, margin " + std::to_string(energy.margin),
                                       energy.margin);
            std::optional<std::vector<double>> warm;
            if (!prev_cell_d.empty()) {
                warm.emplace(atoms.size());
                for (std::size_t a = 0; a < atoms.size(); ++a) {
                    const Cell& cell = partition.cells()[atoms.atom(a).source_index];
                    // Scaled above the parent's d so the sweep still descends monotonically.
                    (*warm)[a] = config.start_factor * prev_cell_d[static_cast<std::size_t>(cell.parent)];
                }
            }
            try {
                report = DiscreteSolver(grid, f, atoms, config, warm).solve();
            } catch (const Error& e) {
                if (!warm || (e.code() != ErrorCode::Convergence && e.code() != ErrorCode::Floor))
                    throw;
                report = DiscreteSolver(grid, f, atoms, config).solve();
            }
        } catch (const Error&) {
            rethrow_with_level(level);
        }

        std::vector<double> rho(nodes.size());
        for (std::size_t j = 0; j < nodes.size(); ++j)
            rho[j] = report.reflector.radius(nodes[j]).rho;
        if (!prev_rho.empty()) {
            double sup = 0.0;
            for (std::size_t j = 0; j < rho.size(); ++j)
                sup = std::max(sup, std::abs(rho[j] - prev_rho[j]));
            out.sup_change.push_back(sup);
        }
        prev_rho = std::move(rho);
        prev_cell_d.assign(partition.cells().size(), 0.0);
        for (std::size_t a = 0; a < atoms.size(); ++a)
            prev_cell_d[atoms.atom(a).source_index] = report.reflector.focal_params()[a];

        out.levels.push_back(
            {level, partition.cells().size(), partition.max_diameter(), partition.total_mass(), std::move(report)});
        out.partition = partition;
        out.target = std::move(atoms);

        if (config.uniform_tol > 0.0 && !out.sup_change.empty() && out.sup_change.back() <= config.uniform_tol) {
            out.uniform_converged = true;
            break;
        }
        if (level < config.max_levels)
            partition = partition.refine(target);
    }
    return out;
}

double delta_efficiency(double delta)
{
    const double c = c_delta(delta);
    const double q = 1.0 - c;
    const double p = 1.0 + c;
    return q * q * q * q * q / (delta * delta * p * p * p);
}

OptimalDelta optimal_delta(double max_distance)
{
    require(max_distance > 0.0, ErrorCode::InvalidArgument, "optimal_delta: M must be positive");
    // r'(delta) has the sign of 4 c_delta - 1, and c_delta decreases in delta.
    double lo = 1e-6, hi = 1e6;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        if (4.0 * c_delta(mid) - 1.0 > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    OptimalDelta out;
    out.delta = 0.5 * (lo + hi);
    out.c = c_delta(out.delta);
    out.k = (1.0 + out.c) / (1.0 - out.c);
    out.constant = delta_efficiency(out.delta) / (max_distance * max_distance);
    return out;
}

double obstruction_threshold(double min_distance, double max_distance, double diameter)
{
    require(min_distance > 0.0 && max_distance >= min_distance && diameter >= 0.0, ErrorCode::InvalidArgument,
            "obstruction_threshold: need 0 < m <= M and diam >= 0");
    const double q = min_distance / (max_distance + diameter);
    return (1.0 - q * q) / (2.0 * q);
}

VisibilityReport visibility_report(const TargetMeasure& target, const Domain& domain, double delta)
{
    require(target.size() > 0, ErrorCode::InvalidArgument, "visibility: empty target");
    VisibilityReport out;
    out.delta_d = obstruction_threshold(target.min_distance(), target.max_distance(), target.diameter());
    out.shadow_clear = true;
    for (const Atom& a : target.atoms())
        if (domain.contains(normalized(a.location)))
            out.shadow_clear = false;
    out.obstruction_clear = delta > out.delta_d;
    return out;
}

VisibilityReport visibility_report(const PlanarTarget& target, const SphericalGrid& grid, double delta)
{
    VisibilityReport out;
    out.delta_d = obstruction_threshold(target.min_distance(), target.max_distance(), target.diameter());
    out.shadow_clear = true;
    const PlanarPatch& patch = target.patch;
    const double offset = dot(patch.origin(), patch.normal());
    for (const Vec3& x : grid.nodes()) {
        const double denom = dot(x, patch.normal());
        if (denom == 0.0)
            continue;
        const double t = offset / denom;
        if (t <= 0.0)
            continue;
        const auto [u, v] = patch.coordinates(t * x);
        const Rect& e = patch.extent();
        if (u >= e.u0 && u <= e.u1 && v >= e.v0 && v <= e.v1) {
            out.shadow_clear = false;
            break;
        }
    }
    out.obstruction_clear = delta > out.delta_d;
    return out;
}

MinimalityResult overshoot_minimality_check(const SphericalGrid& grid, const SampledIntensity& f,
                                            const TargetMeasure& target, const SolverConfig& config,
                                            const SolveReport& reference, std::size_t trials,
                                            std::uint64_t seed)
{
    MinimalityResult out;
    out.trials = trials;
    out.min_overshoot_excess = INFINITY;
    const std::vector<double>& ref = reference.reflector.focal_params();
    require(ref.size() == target.size(), ErrorCode::InvalidArgument, "minimality: report does not match target");
    if (target.size() == 1) {
        out.min_overshoot_excess = 0.0;
        return out;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> start(1.02, 1.5);
    std::vector<std::size_t> order(target.size() - 1);
    std::iota(order.begin(), order.end(), std::size_t{1});
    const double gap_tol = 10.0 * config.bisection_tol;
    const double mu_tol = config.residual_tol * reference.targets[0];
    for (std::size_t t = 0; t < trials; ++t) {
        std::shuffle(order.begin(), order.end(), rng);
        SolverConfig trial_config = config;
        trial_config.start_factor = start(rng);
        DiscreteSolver solver(grid, f, target, trial_config);
        const SolveReport run = solver.solve(order);
        const double scale = solver.scale();
        const std::vector<double>& w = run.reflector.focal_params();
        double gap = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            gap = std::max(gap, std::abs(w[i] - ref[i]) / scale);
        out.max_focal_gap = std::max(out.max_focal_gap, gap);
        const double excess = run.measure.per_atom[0] - reference.measure.per_atom[0];
        out.min_overshoot_excess = std::min(out.min_overshoot_excess, excess);
        if (gap > gap_tol || excess < -mu_tol)
            throw MinimalityViolation("minimality: trial " + std::to_string(t) + " differs by " +
                                          std::to_string(gap) + " (scaled) with overshoot change " +
                                          std::to_string(excess),
                                      ref, w);
    }
    return out;
}

} // namespace lumen
