#include "lumen_cli/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lumen/envelope.hpp"
#include "lumen/solver.hpp"
#include "lumen/validate.hpp"
#include "lumen_cli/config.hpp"
#include "lumen_cli/mesh.hpp"

namespace lumen::cli {

using nlohmann::ordered_json;

namespace {

const std::set<std::string> kSubcommands{"feasibility", "solve-near", "solve-far", "solve-general",
                                         "validate",    "export-mesh", "optimal-delta"};

double finite(double x, const char* what)
{
    if (!std::isfinite(x))
        throw Error(ErrorCode::NumericError, std::string("report: non-finite value for ") + what);
    return x;
}

ordered_json numbers(const std::vector<double>& xs, const char* what)
{
    ordered_json a = ordered_json::array();
    for (double x : xs)
        a.push_back(finite(x, what));
    return a;
}

std::string fmt(const char* spec, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::filesystem::path under(const std::filesystem::path& dir, const std::string& name)
{
    const std::filesystem::path p(name);
    return p.is_absolute() ? p : dir / p;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string csv_number(double x) { return fmt("%.17g", x); }

ordered_json energy_json(const EnergyCheck& e)
{
    return {{"feasible", e.feasible},
            {"margin", finite(e.margin, "margin")},
            {"total_flux", finite(e.total_flux, "total_flux")},
            {"constant", finite(e.constant, "constant")},
            {"target_mass", finite(e.target_mass, "target_mass")}};
}

ordered_json solve_json(const SolveReport& r)
{
    return {{"focal_params", numbers(r.reflector.focal_params(), "focal_params")},
            {"targets", numbers(r.targets, "targets")},
            {"measure", numbers(r.measure.per_atom, "measure")},
            {"measure_total", finite(r.measure.total, "measure_total")},
            {"residuals", numbers(r.residuals, "residuals")},
            {"max_residual", finite(r.max_residual, "max_residual")},
            {"overshoot", finite(r.overshoot, "overshoot")},
            {"sweeps", r.sweeps},
            {"polished", r.polished},
            {"tie_fraction", finite(r.tie_fraction, "tie_fraction")},
            {"coverage", finite(r.coverage, "coverage")},
            {"margin", finite(r.margin, "margin")},
            {"residual_trace", numbers(r.residual_trace, "residual_trace")}};
}

// Per-atom table, in the solver's order (overshoot atom first).
std::string atoms_csv(const TargetMeasure& t, const SolveReport& r)
{
    std::string s = "index,source_index,x,y,z,g,mu,residual,d\r\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Atom& a = t.atom(i);
        s += std::to_string(i) + "," + std::to_string(a.source_index) + "," + csv_number(a.location.x) + "," +
             csv_number(a.location.y) + "," + csv_number(a.location.z) + "," + csv_number(r.targets[i]) + "," +
             csv_number(r.measure.per_atom[i]) + "," + csv_number(r.residuals[i]) + "," +
             csv_number(r.reflector.focal_params()[i]) + "\r\n";
    }
    return s;
}

struct Job
{
    const Invocation& inv;
    JobConfig cfg;
    std::optional<SphericalGrid> grid;
    std::optional<SampledIntensity> f;
    ordered_json report;
};

void prepare(Job& job)
{
    JobConfig& c = job.cfg;
    if (job.inv.seed)
        c.seed = *job.inv.seed;
    if (job.inv.resolution)
        c.resolution = *job.inv.resolution;
    if (job.inv.tol)
        c.solver.residual_tol = *job.inv.tol;
    refresh_echo(c);
    resolve_auto(c);
    job.grid = SphericalGrid::build(c.domain, c.resolution);
    job.f = sample(c.intensity, *job.grid);
    job.report["schema"] = kReportSchema;
    job.report["subcommand"] = job.inv.subcommand;
    job.report["config"] = c.echo;
    job.report["grid"] = {{"nodes", job.grid->size()},
                          {"frequency", job.grid->frequency()},
                          {"total_weight", job.grid->total_weight()},
                          {"domain_area", c.domain.area()},
                          {"total_flux", job.f->total_flux}};
}

void require_shape(const Job& job, Mode mode, bool planar)
{
    const JobConfig& c = job.cfg;
    const std::string& sub = job.inv.subcommand;
    if (c.mode != mode)
        throw Error(ErrorCode::Config,
                    "config: " + sub + " needs mode \"" + (mode == Mode::Near ? "near" : "far") + "\"");
    if (planar && !c.planar)
        throw Error(ErrorCode::Config, "config: " + sub + " needs a planar target");
    if (!planar && !c.atoms)
        throw Error(ErrorCode::Config, "config: " + sub + " needs an atoms target");
}

void regularity(Job& job, const Reflector& r, const TargetMeasure& t)
{
    const RegularityReport reg = regularity_report(r, *job.grid);
    ordered_json j{{"lipschitz_est", reg.lipschitz_est},
                   {"harnack_ratio", reg.harnack_ratio},
                   {"min_rho", reg.min_rho},
                   {"max_rho", reg.max_rho}};
    const SolverConfig& s = job.cfg.solver;
    if (r.kind() == ReflectorKind::Near) {
        j["lipschitz_bound"] = lipschitz_bound(s.delta, t.max_distance());
        j["harnack_bound"] = harnack_bound(s.delta);
    } else {
        j["rho_lower_bound"] = s.a;
        j["rho_upper_bound"] = s.a_prime / s.delta;
    }
    job.report["regularity"] = j;
}

ordered_json visibility_json(const VisibilityReport& v)
{
    return {{"delta_d", v.delta_d}, {"shadow_clear", v.shadow_clear}, {"obstruction_clear", v.obstruction_clear}};
}

struct Solved
{
    TargetMeasure target;
    SolveReport report;
};

Solved solve_atoms(Job& job)
{
    const TargetMeasure t = atom_target(job.cfg);
    const EnergyCheck e = check_energy_condition(*job.f, t, job.cfg.solver);
    job.report["feasibility"] = energy_json(e);
    if (!e.feasible)
        throw FeasibilityError("energy condition fails, margin " + fmt("%.6g", e.margin), e.margin);
    DiscreteSolver solver(*job.grid, *job.f, t, job.cfg.solver);
    SolveReport r = solver.solve();
    job.report["solve"] = solve_json(r);
    regularity(job, r.reflector, t);
    if (t.kind() == TargetKind::Points)
        job.report["visibility"] = visibility_json(visibility_report(t, job.cfg.domain, job.cfg.solver.delta));
    return {t, std::move(r)};
}

Solved solve_planar(Job& job)
{
    const PlanarTarget& p = *job.cfg.planar;
    const GeneralReport g = solve_general(*job.grid, *job.f, p, job.cfg.solver);
    const SolveReport& last = g.levels.back().report;
    ordered_json levels = ordered_json::array();
    for (const GeneralLevel& l : g.levels)
        levels.push_back({{"level", l.level},
                          {"cells", l.cells},
                          {"max_cell_diameter", l.max_cell_diameter},
                          {"cell_mass_total", l.cell_mass_total},
                          {"max_residual", l.report.max_residual},
                          {"sweeps", l.report.sweeps},
                          {"overshoot", l.report.overshoot}});
    job.report["feasibility"] = energy_json(check_energy_condition(*job.f, g.target, job.cfg.solver));
    job.report["general"] = {{"levels", levels},
                             {"sup_change", numbers(g.sup_change, "sup_change")},
                             {"uniform_converged", g.uniform_converged}};
    job.report["solve"] = solve_json(last);
    regularity(job, last.reflector, g.target);
    job.report["visibility"] = visibility_json(visibility_report(p, *job.grid, job.cfg.solver.delta));
    return {g.target, last};
}

Solved solve_any(Job& job)
{
    if (job.cfg.planar)
        return solve_planar(job);
    return solve_atoms(job);
}

void validate(Job& job, const Solved& s)
{
    const ValidationToggles& t = job.cfg.outputs.validation;
    const Reflector& r = s.report.reflector;
    ordered_json v = ordered_json::object();
    if (t.conservation) {
        const double flux = weighted_flux(r, *job.grid, *job.f, job.cfg.solver.weight);
        const double total = s.report.measure.total;
        v["conservation"] = {{"measure_total", total},
                             {"weighted_flux", flux},
                             {"relative_gap", std::abs(total - flux) / std::abs(flux)}};
    }
    if (t.raytrace) {
        RayTraceOptions o;
        o.rays = t.rays;
        o.seed = job.cfg.seed;
        const RayTraceResult rt = raytrace(r, job.cfg.domain, job.cfg.intensity, job.cfg.solver.weight,
                                           s.target.max_distance(), o);
        double max_sigma = 0.0, max_rel = 0.0;
        for (std::size_t i = 0; i < rt.totals.size(); ++i) {
            const double mu = s.report.measure.per_atom[i];
            const double diff = std::abs(rt.totals[i] - mu);
            if (rt.standard_error[i] > 0.0)
                max_sigma = std::max(max_sigma, diff / rt.standard_error[i]);
            max_rel = std::max(max_rel, diff / mu);
        }
        v["raytrace"] = {{"rays", rt.rays},
                         {"accepted", rt.accepted},
                         {"unmatched", rt.unmatched},
                         {"totals", numbers(rt.totals, "raytrace totals")},
                         {"standard_error", numbers(rt.standard_error, "raytrace standard_error")},
                         {"max_standard_errors", max_sigma},
                         {"max_relative_difference", max_rel}};
    }
    if (t.transport && job.cfg.planar) {
        TransportOptions o;
        o.samples = t.transport_samples;
        o.seed = job.cfg.seed + 1;
        const TransportCheck tc = transport_residual(r, job.cfg.domain, job.cfg.intensity, *job.cfg.planar, o);
        v["transport"] = {{"requested", tc.requested},
                          {"evaluated", tc.evaluated},
                          {"skipped_tie", tc.skipped_tie},
                          {"skipped_invalid", tc.skipped_invalid},
                          {"violations", tc.violations},
                          {"max_violation", tc.max_violation},
                          {"max_rel_residual", tc.max_rel_residual},
                          {"h", tc.h}};
    }
    if (t.obstruction && r.kind() == ReflectorKind::Near) {
        const ObstructionResult ob = obstruction_raycheck(r, job.cfg.domain, t.obstruction_samples, job.cfg.seed + 2);
        v["obstruction"] = {{"samples", ob.samples}, {"violations", ob.violations}, {"max_excess", ob.max_excess}};
    }
    if (t.minimality && !job.cfg.planar) {
        const MinimalityResult m = overshoot_minimality_check(*job.grid, *job.f, s.target, job.cfg.solver, s.report,
                                                              t.minimality_trials, job.cfg.seed + 3);
        v["minimality"] = {{"trials", m.trials},
                           {"max_focal_gap", m.max_focal_gap},
                           {"min_overshoot_excess", m.trials > 0 ? m.min_overshoot_excess : 0.0}};
    }
    job.report["validation"] = v;
}

void emit(Job& job, const Solved* s, bool mesh_always)
{
    const std::filesystem::path dir = job.inv.out_dir;
    write_text(under(dir, job.cfg.outputs.report), job.report.dump(2) + "\n");
    if (!s)
        return;
    if (!job.cfg.outputs.csv.empty())
        write_text(under(dir, job.cfg.outputs.csv), atoms_csv(s->target, s->report));
    std::string mesh = job.cfg.outputs.mesh;
    if (mesh.empty() && mesh_always)
        mesh = "reflector.obj";
    if (!mesh.empty()) {
        const auto path = under(dir, mesh);
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        write_obj(s->report.reflector, *job.grid, path);
    }
}

std::string escape(const std::string& s)
{
    // JSON string escaping keeps the line parseable and free of newlines.
    return ordered_json(s).dump();
}

int dispatch(const Invocation& inv, std::ostream& out)
{
    if (!kSubcommands.count(inv.subcommand))
        throw Error(ErrorCode::Config, "unknown subcommand " + inv.subcommand);

    if (inv.subcommand == "optimal-delta") {
        if (!inv.max_distance)
            throw Error(ErrorCode::Config, "optimal-delta needs --M");
        const OptimalDelta o = optimal_delta(*inv.max_distance);
        if (!inv.quiet)
            out << "delta*=" << fmt("%.7g", o.delta) << " k*=" << fmt("%.7g", o.k) << " C*=" << fmt("%.7g", o.constant)
                << " c*=" << fmt("%.7g", o.c) << "\n";
        return 0;
    }
    if (inv.config.empty())
        throw Error(ErrorCode::Config, inv.subcommand + " needs --config");

    Job job{inv, load_config(inv.config), std::nullopt, std::nullopt, {}};
    prepare(job);
    const std::string& sub = inv.subcommand;

    if (sub == "feasibility") {
        TargetMeasure t = job.cfg.planar ? CellPartition::initial(*job.cfg.planar, job.cfg.planar->diameter())
                                               .to_target(*job.cfg.planar)
                                         : atom_target(job.cfg);
        const EnergyCheck e = check_energy_condition(*job.f, t, job.cfg.solver);
        job.report["feasibility"] = energy_json(e);
        emit(job, nullptr, false);
        if (!e.feasible)
            throw FeasibilityError("energy condition fails, margin " + fmt("%.6g", e.margin), e.margin);
        if (!inv.quiet)
            out << "feasible: margin " << fmt("%.6g", e.margin) << " (C = " << fmt("%.6g", e.constant) << ")\n";
        return 0;
    }

    std::optional<Solved> solved;
    try {
        if (sub == "solve-near") {
            require_shape(job, Mode::Near, false);
            solved = solve_atoms(job);
        } else if (sub == "solve-far") {
            require_shape(job, Mode::Far, false);
            solved = solve_atoms(job);
        } else if (sub == "solve-general") {
            require_shape(job, Mode::Near, true);
            solved = solve_planar(job);
        } else {
            solved = solve_any(job);
        }
        if (sub == "validate")
            validate(job, *solved);
    } catch (const FeasibilityError&) {
        emit(job, nullptr, false);
        throw;
    }
    emit(job, &*solved, sub == "export-mesh");
    if (!inv.quiet) {
        const SolveReport& r = solved->report;
        out << sub << ": " << solved->target.size() << " atoms, " << r.sweeps << " sweeps, max residual "
            << fmt("%.3e", r.max_residual) << ", overshoot " << fmt("%.6g", r.overshoot) << "\n";
    }
    return 0;
}

} // namespace

int exit_code(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Feasibility:
        return 2;
    case ErrorCode::Convergence:
    case ErrorCode::Floor:
        return 3;
    default:
        return 1;
    }
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(inv, out);
    } catch (const Error& e) {
        err << "error: code=" << to_string(e.code()) << " message=" << escape(e.what()) << "\n";
        return exit_code(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: code=" << to_string(ErrorCode::Io) << " message=" << escape(e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: code=" << to_string(ErrorCode::InvalidArgument) << " message=" << escape(e.what()) << "\n";
        return 1;
    }
}

} // namespace lumen::cli
