#include "lumen_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "lumen/error.hpp"
#include "lumen/geometry.hpp"

namespace lumen::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::Config, "config: " + message); }

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) {
        if (!out.empty())
            out += ", ";
        out += s;
    }
    return out;
}

// Collects unknown keys across the whole document so one error lists them all.
class Reader
{
public:
    void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
    {
        if (!obj.is_object())
            config_error(path + " must be an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : obj.items())
            if (!ok.count(key))
                unknown_.push_back(path.empty() ? key : path + "." + key);
    }

    void finish() const
    {
        if (!unknown_.empty())
            config_error("unknown keys: " + join(unknown_));
    }

private:
    std::vector<std::string> unknown_;
};

const json& need(const json& obj, const char* key, const std::string& path)
{
    auto it = obj.find(key);
    if (it == obj.end())
        config_error("missing key " + (path.empty() ? std::string(key) : path + "." + key));
    return *it;
}

double number(const json& v, const std::string& path)
{
    if (!v.is_number())
        config_error(path + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        config_error(path + " must be finite");
    return x;
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback)
{
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, path + "." + key);
}

std::uint64_t count_or(const json& obj, const char* key, const std::string& path, std::uint64_t fallback)
{
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
        config_error(path + "." + key + " must be a nonnegative integer");
    return it->get<std::uint64_t>();
}

bool flag_or(const json& obj, const char* key, const std::string& path, bool fallback)
{
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_boolean())
        config_error(path + "." + key + " must be true or false");
    return it->get<bool>();
}

std::string string_of(const json& v, const std::string& path)
{
    if (!v.is_string())
        config_error(path + " must be a string");
    return v.get<std::string>();
}

Vec3 vec3(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 3)
        config_error(path + " must be an array of 3 numbers");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
}

std::vector<double> numbers(const json& v, const std::string& path)
{
    if (!v.is_array())
        config_error(path + " must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<Vec3> vec3s(const json& v, const std::string& path)
{
    if (!v.is_array())
        config_error(path + " must be an array of 3-vectors");
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(vec3(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

ordered_json to_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

Domain parse_domain(Reader& rd, const json& j, ordered_json& echo)
{
    const std::string type = string_of(need(j, "type", "domain"), "domain.type");
    echo["type"] = type;
    if (type == "sphere") {
        rd.check_keys(j, "domain", {"type"});
        return Domain::sphere();
    }
    if (type == "hemisphere") {
        rd.check_keys(j, "domain", {"type", "pole"});
        const Vec3 pole = j.contains("pole") ? vec3(j["pole"], "domain.pole") : Vec3{0.0, 0.0, 1.0};
        echo["pole"] = to_json(pole);
        return Domain::hemisphere(pole);
    }
    if (type == "cap") {
        rd.check_keys(j, "domain", {"type", "center", "half_angle"});
        const Vec3 center = vec3(need(j, "center", "domain"), "domain.center");
        const double half = number(need(j, "half_angle", "domain"), "domain.half_angle");
        echo["center"] = to_json(center);
        echo["half_angle"] = half;
        return Domain::cap(center, half);
    }
    if (type == "polygon") {
        rd.check_keys(j, "domain", {"type", "vertices"});
        const auto vs = vec3s(need(j, "vertices", "domain"), "domain.vertices");
        ordered_json arr = ordered_json::array();
        for (const Vec3& v : vs)
            arr.push_back(to_json(v));
        echo["vertices"] = arr;
        return Domain::polygon(vs);
    }
    config_error("domain.type must be sphere, hemisphere, cap or polygon");
}

// Two columns per row: polar angle (radians) and intensity. A non-numeric first row is a header.
void read_profile_file(const std::filesystem::path& path, std::vector<double>& angles, std::vector<double>& values)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "config: cannot read intensity file " + path.string());
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            config_error("intensity file " + path.string() + " row " + std::to_string(row) + " needs two columns");
        try {
            const double x = std::stod(a);
            const double y = std::stod(b);
            angles.push_back(x);
            values.push_back(y);
        } catch (const std::exception&) {
            if (angles.empty() && row == 1)
                continue;
            config_error("intensity file " + path.string() + " row " + std::to_string(row) + " is not numeric");
        }
    }
}

IntensityField parse_intensity(Reader& rd, const json& j, const std::filesystem::path& base, ordered_json& echo)
{
    const std::string type = string_of(need(j, "type", "intensity"), "intensity.type");
    echo["type"] = type;
    if (type == "constant") {
        rd.check_keys(j, "intensity", {"type", "value"});
        const double v = number(need(j, "value", "intensity"), "intensity.value");
        echo["value"] = v;
        return IntensityField::constant(v);
    }
    if (type == "profile" || type == "file") {
        const Vec3 axis = j.contains("axis") ? vec3(j["axis"], "intensity.axis") : Vec3{0.0, 0.0, 1.0};
        std::vector<double> angles, values;
        if (type == "profile") {
            rd.check_keys(j, "intensity", {"type", "axis", "angles", "values"});
            angles = numbers(need(j, "angles", "intensity"), "intensity.angles");
            values = numbers(need(j, "values", "intensity"), "intensity.values");
        } else {
            rd.check_keys(j, "intensity", {"type", "axis", "path"});
            const std::string p = string_of(need(j, "path", "intensity"), "intensity.path");
            std::filesystem::path file(p);
            if (file.is_relative())
                file = base / file;
            read_profile_file(file, angles, values);
            echo["path"] = p;
        }
        echo["axis"] = to_json(axis);
        echo["angles"] = angles;
        echo["values"] = values;
        return IntensityField::profile(axis, angles, values);
    }
    config_error("intensity.type must be constant, profile or file");
}

PlanarDensity parse_density(Reader& rd, const json& j, const Rect& extent, ordered_json& echo)
{
    const std::string type = string_of(need(j, "type", "target.density"), "target.density.type");
    echo["type"] = type;
    if (type == "uniform") {
        rd.check_keys(j, "target.density", {"type", "value"});
        const double v = number(need(j, "value", "target.density"), "target.density.value");
        echo["value"] = v;
        return PlanarDensity::uniform(v);
    }
    if (type == "gaussian") {
        rd.check_keys(j, "target.density", {"type", "amplitude", "center", "sigma"});
        const double amp = number(need(j, "amplitude", "target.density"), "target.density.amplitude");
        const auto c = numbers(need(j, "center", "target.density"), "target.density.center");
        if (c.size() != 2)
            config_error("target.density.center must hold 2 numbers");
        const double sigma = number(need(j, "sigma", "target.density"), "target.density.sigma");
        echo["amplitude"] = amp;
        echo["center"] = c;
        echo["sigma"] = sigma;
        return PlanarDensity::gaussian(amp, c[0], c[1], sigma);
    }
    if (type == "samples") {
        rd.check_keys(j, "target.density", {"type", "nu", "nv", "values"});
        const auto nu = count_or(j, "nu", "target.density", 0);
        const auto nv = count_or(j, "nv", "target.density", 0);
        const auto values = numbers(need(j, "values", "target.density"), "target.density.values");
        echo["nu"] = nu;
        echo["nv"] = nv;
        echo["values"] = values;
        return PlanarDensity::samples(extent, nu, nv, values);
    }
    config_error("target.density.type must be uniform, gaussian or samples");
}

void parse_target(Reader& rd, const json& j, JobConfig& job, ordered_json& echo)
{
    const std::string type = string_of(need(j, "type", "target"), "target.type");
    echo["type"] = type;
    if (type == "atoms") {
        rd.check_keys(j, "target", {"type", "locations", "masses", "overshoot"});
        AtomSpec spec;
        spec.locations = vec3s(need(j, "locations", "target"), "target.locations");
        spec.masses = numbers(need(j, "masses", "target"), "target.masses");
        spec.overshoot = count_or(j, "overshoot", "target", 0);
        if (spec.locations.size() != spec.masses.size())
            config_error("target.locations and target.masses differ in length");
        ordered_json locs = ordered_json::array();
        for (const Vec3& v : spec.locations)
            locs.push_back(to_json(v));
        echo["locations"] = locs;
        echo["masses"] = spec.masses;
        echo["overshoot"] = spec.overshoot;
        job.atoms = std::move(spec);
        return;
    }
    if (type == "planar") {
        rd.check_keys(j, "target", {"type", "origin", "u_axis", "v_axis", "extent", "density", "overshoot"});
        const Vec3 origin = vec3(need(j, "origin", "target"), "target.origin");
        const Vec3 u = vec3(need(j, "u_axis", "target"), "target.u_axis");
        const Vec3 v = vec3(need(j, "v_axis", "target"), "target.v_axis");
        const auto ext = numbers(need(j, "extent", "target"), "target.extent");
        if (ext.size() != 4)
            config_error("target.extent must be [u0, u1, v0, v1]");
        const Rect extent{ext[0], ext[1], ext[2], ext[3]};
        if (!(extent.u1 > extent.u0 && extent.v1 > extent.v0))
            config_error("target.extent must have u0 < u1 and v0 < v1");
        const auto p0 = numbers(need(j, "overshoot", "target"), "target.overshoot");
        if (p0.size() != 2)
            config_error("target.overshoot must be [u, v] in patch coordinates");
        echo["origin"] = to_json(origin);
        echo["u_axis"] = to_json(u);
        echo["v_axis"] = to_json(v);
        echo["extent"] = ext;
        ordered_json dens;
        PlanarDensity density = parse_density(rd, need(j, "density", "target"), extent, dens);
        echo["density"] = dens;
        echo["overshoot"] = p0;
        job.planar = PlanarTarget{PlanarPatch(origin, u, v, extent), std::move(density), p0[0], p0[1]};
        return;
    }
    config_error("target.type must be atoms or planar");
}

void parse_solver(Reader& rd, const json& j, JobConfig& job)
{
    rd.check_keys(j, "solver",
                  {"delta", "k", "a", "a_prime", "residual_tol", "max_sweeps", "bisection_tol", "polish_tol",
                   "max_polish_sweeps", "start_factor", "resolution", "seed", "eps0", "uniform_tol", "max_levels"});
    SolverConfig& s = job.solver;
    auto auto_or_number = [&](const char* key, double& slot, bool& is_auto) {
        auto it = j.find(key);
        if (it == j.end())
            return;
        if (it->is_string()) {
            if (it->get<std::string>() != "auto")
                config_error(std::string("solver.") + key + " must be a number or \"auto\"");
            is_auto = true;
            return;
        }
        slot = number(*it, std::string("solver.") + key);
    };
    auto_or_number("delta", s.delta, job.auto_delta);
    auto_or_number("k", s.k, job.auto_k);
    s.a = number_or(j, "a", "solver", s.a);
    s.a_prime = number_or(j, "a_prime", "solver", s.a_prime);
    s.residual_tol = number_or(j, "residual_tol", "solver", s.residual_tol);
    s.max_sweeps = static_cast<int>(count_or(j, "max_sweeps", "solver", static_cast<std::uint64_t>(s.max_sweeps)));
    s.bisection_tol = number_or(j, "bisection_tol", "solver", s.bisection_tol);
    s.polish_tol = number_or(j, "polish_tol", "solver", s.polish_tol);
    s.max_polish_sweeps = static_cast<int>(
        count_or(j, "max_polish_sweeps", "solver", static_cast<std::uint64_t>(s.max_polish_sweeps)));
    s.start_factor = number_or(j, "start_factor", "solver", s.start_factor);
    s.eps0 = number_or(j, "eps0", "solver", s.eps0);
    s.uniform_tol = number_or(j, "uniform_tol", "solver", s.uniform_tol);
    s.max_levels = static_cast<int>(count_or(j, "max_levels", "solver", static_cast<std::uint64_t>(s.max_levels)));
    job.resolution = count_or(j, "resolution", "solver", job.resolution);
    job.seed = count_or(j, "seed", "solver", job.seed);
}

void parse_outputs(Reader& rd, const json& j, JobConfig& job)
{
    rd.check_keys(j, "outputs", {"report", "csv", "mesh", "validation"});
    Outputs& o = job.outputs;
    if (j.contains("report"))
        o.report = string_of(j["report"], "outputs.report");
    if (j.contains("csv"))
        o.csv = string_of(j["csv"], "outputs.csv");
    if (j.contains("mesh"))
        o.mesh = string_of(j["mesh"], "outputs.mesh");
    if (j.contains("validation")) {
        const json& v = j["validation"];
        rd.check_keys(v, "outputs.validation",
                      {"raytrace", "rays", "conservation", "transport", "transport_samples", "obstruction",
                       "obstruction_samples", "minimality", "minimality_trials"});
        ValidationToggles& t = o.validation;
        const std::string p = "outputs.validation";
        t.raytrace = flag_or(v, "raytrace", p, t.raytrace);
        t.rays = count_or(v, "rays", p, t.rays);
        t.conservation = flag_or(v, "conservation", p, t.conservation);
        t.transport = flag_or(v, "transport", p, t.transport);
        t.transport_samples = count_or(v, "transport_samples", p, t.transport_samples);
        t.obstruction = flag_or(v, "obstruction", p, t.obstruction);
        t.obstruction_samples = count_or(v, "obstruction_samples", p, t.obstruction_samples);
        t.minimality = flag_or(v, "minimality", p, t.minimality);
        t.minimality_trials = count_or(v, "minimality_trials", p, t.minimality_trials);
    }
}

} // namespace

void refresh_echo(JobConfig& job)
{
    const SolverConfig& s = job.solver;
    ordered_json e;
    if (job.auto_delta)
        e["delta"] = "auto";
    else
        e["delta"] = s.delta;
    if (job.auto_k)
        e["k"] = "auto";
    else
        e["k"] = s.k;
    e["a"] = s.a;
    e["a_prime"] = s.a_prime;
    e["residual_tol"] = s.residual_tol;
    e["max_sweeps"] = s.max_sweeps;
    e["bisection_tol"] = s.bisection_tol;
    e["polish_tol"] = s.polish_tol;
    e["max_polish_sweeps"] = s.max_polish_sweeps;
    e["start_factor"] = s.start_factor;
    e["resolution"] = job.resolution;
    e["seed"] = job.seed;
    e["eps0"] = s.eps0;
    e["uniform_tol"] = s.uniform_tol;
    e["max_levels"] = s.max_levels;
    job.echo["solver"] = e;

    const Outputs& o = job.outputs;
    ordered_json out;
    out["report"] = o.report;
    out["csv"] = o.csv;
    out["mesh"] = o.mesh;
    const ValidationToggles& t = o.validation;
    out["validation"] = {{"raytrace", t.raytrace},
                         {"rays", t.rays},
                         {"conservation", t.conservation},
                         {"transport", t.transport},
                         {"transport_samples", t.transport_samples},
                         {"obstruction", t.obstruction},
                         {"obstruction_samples", t.obstruction_samples},
                         {"minimality", t.minimality},
                         {"minimality_trials", t.minimality_trials}};
    job.echo["outputs"] = out;
}

JobConfig parse_config(const json& doc, const std::filesystem::path& base_dir)
{
    Reader rd;
    rd.check_keys(doc, "", {"mode", "domain", "intensity", "target", "solver", "outputs"});
    JobConfig job;
    try {
        const std::string mode = string_of(need(doc, "mode", ""), "mode");
        if (mode == "near")
            job.mode = Mode::Near;
        else if (mode == "far")
            job.mode = Mode::Far;
        else
            config_error("mode must be near or far");
        job.echo["mode"] = mode;

        ordered_json dom, inten, tgt;
        job.domain = parse_domain(rd, need(doc, "domain", ""), dom);
        job.echo["domain"] = dom;
        if (doc.contains("intensity"))
            job.intensity = parse_intensity(rd, doc["intensity"], base_dir, inten);
        else
            inten = {{"type", "constant"}, {"value", 1.0}};
        job.echo["intensity"] = inten;
        parse_target(rd, need(doc, "target", ""), job, tgt);
        job.echo["target"] = tgt;
        if (doc.contains("solver"))
            parse_solver(rd, doc["solver"], job);
        if (doc.contains("outputs"))
            parse_outputs(rd, doc["outputs"], job);
    } catch (const Error& e) {
        // Report unknown keys first: they usually explain the other failure.
        rd.finish();
        if (e.code() == ErrorCode::Config || e.code() == ErrorCode::Io)
            throw;
        throw Error(ErrorCode::Config, std::string("config: ") + e.what());
    }
    rd.finish();
    if (job.mode == Mode::Far && job.planar)
        config_error("planar targets are near-field only");
    if (job.mode == Mode::Far && (job.auto_delta || job.auto_k))
        config_error("\"auto\" delta and k apply to the near field only");
    refresh_echo(job);
    return job;
}

JobConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "config: cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error(path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

TargetMeasure atom_target(const JobConfig& job)
{
    require(job.atoms.has_value(), ErrorCode::Config, "config: target.type must be atoms for this subcommand");
    const AtomSpec& a = *job.atoms;
    if (job.mode == Mode::Far)
        return TargetMeasure::directions(a.locations, a.masses, a.overshoot);
    return TargetMeasure::points(a.locations, a.masses, a.overshoot);
}

void resolve_auto(JobConfig& job)
{
    if (!job.auto_delta && !job.auto_k)
        return;
    double m = 0.0, big_m = 0.0, diam = 0.0;
    if (job.planar) {
        m = job.planar->min_distance();
        big_m = job.planar->max_distance();
        diam = job.planar->diameter();
    } else {
        const TargetMeasure t = atom_target(job);
        m = t.min_distance();
        big_m = t.max_distance();
        diam = t.diameter();
    }
    if (job.auto_delta) {
        const OptimalDelta opt = optimal_delta(big_m);
        const double delta_d = obstruction_threshold(m, big_m, diam);
        if (!(opt.delta > delta_d))
            config_error("delta \"auto\" resolves to " + std::to_string(opt.delta) +
                         ", not above the obstruction threshold " + std::to_string(delta_d));
        job.solver.delta = opt.delta;
    }
    if (job.auto_k)
        job.solver.k = DeltaBound::from_delta(job.solver.delta).ratio();
    job.auto_delta = false;
    job.auto_k = false;
    refresh_echo(job);
}

} // namespace lumen::cli
