#include "anisoflow/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace anisoflow {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// -- reading -----------------------------------------------------------------

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw SchemaViolation(path_.empty() ? "<root>" : path_, "must be an object");
    }

    std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

    bool has(const std::string& name) const { return j_.contains(name); }

    const json* find(const std::string& name) {
        seen_.insert(name);
        auto it = j_.find(name);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& name) {
        const json* v = find(name);
        if (!v) throw SchemaViolation(key(name), "is required");
        return *v;
    }

    void number(const std::string& name, double& out) {
        if (const json* v = find(name)) out = as_number(*v, key(name));
    }

    void integer(const std::string& name, int& out) {
        if (const json* v = find(name)) out = as_integer(*v, key(name));
    }

    void boolean(const std::string& name, bool& out) {
        if (const json* v = find(name)) {
            if (!v->is_boolean()) throw SchemaViolation(key(name), "must be a boolean");
            out = v->get<bool>();
        }
    }

    std::string string(const std::string& name, const std::string& fallback) {
        const json* v = find(name);
        if (!v) return fallback;
        if (!v->is_string()) throw SchemaViolation(key(name), "must be a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& name, const json& v) {
        if (!v.is_array()) throw SchemaViolation(key(name), "must be an array of numbers");
        std::vector<double> out;
        for (const json& x : v) out.push_back(as_number(x, key(name)));
        return out;
    }

    Reader object(const std::string& name) { return Reader(require(name), key(name)); }

    void reject_unknown() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw SchemaViolation(key(it.key()), "unknown key");
        }
    }

    static double as_number(const json& v, const std::string& key) {
        if (!v.is_number()) throw SchemaViolation(key, "must be a number");
        return v.get<double>();
    }

    static int as_integer(const json& v, const std::string& key) {
        if (!v.is_number_integer()) throw SchemaViolation(key, "must be an integer");
        return v.get<int>();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

NormSpec read_norm(Reader r) {
    NormSpec spec;
    const std::string family = r.string("family", "");
    if (family.empty()) throw SchemaViolation(r.key("family"), "is required");
    try {
        spec.family = norm_family_from_string(family);
    } catch (const Error&) {
        throw SchemaViolation(r.key("family"), "must be one of euclidean, randers, lp_smooth");
    }
    r.integer("dim", spec.dim);
    if (spec.dim < 2 || spec.dim > 3) throw SchemaViolation(r.key("dim"), "must be 2 or 3");

    spec.derivative_mode = spec.family == NormFamily::lp_smooth ? DerivativeMode::forward_ad : DerivativeMode::analytic;
    const std::string mode = r.string("derivative_mode", std::string(to_string(spec.derivative_mode)));
    try {
        spec.derivative_mode = derivative_mode_from_string(mode);
    } catch (const Error&) {
        throw SchemaViolation(r.key("derivative_mode"), "must be one of analytic, forward_ad, finite_difference");
    }

    std::string param_key;
    if (spec.family == NormFamily::randers) {
        spec.b = r.numbers("b", r.require("b"));
        param_key = r.key("b");
    } else if (spec.family == NormFamily::lp_smooth) {
        r.integer("p", spec.p);
        r.number("epsilon", spec.epsilon);
        param_key = r.key(spec.p < 4 || spec.p % 2 ? "p" : "epsilon");
    }
    r.reject_unknown();
    if (auto err = check_norm_params(spec)) throw SchemaViolation(param_key, *err);
    return spec;
}

ShapeSpec read_shape(Reader r, int dim) {
    ShapeSpec s;
    s.kind = r.string("kind", "");
    static const std::set<std::string> kinds{"circle", "ellipse", "wulff", "radial_values", "points"};
    if (!kinds.count(s.kind)) {
        throw SchemaViolation(r.key("kind"), "must be one of circle, ellipse, wulff, radial_values, points");
    }
    s.center.assign(dim, 0.0);
    if (const json* c = r.find("center")) {
        s.center = r.numbers("center", *c);
        if (static_cast<int>(s.center.size()) != dim) throw SchemaViolation(r.key("center"), "must have dim components");
    }
    auto positive = [&](const std::string& name, double& v) {
        r.number(name, v);
        if (!(std::isfinite(v) && v > 0.0)) throw SchemaViolation(r.key(name), "must be > 0");
    };
    if (s.kind == "circle" || s.kind == "wulff") positive("radius", s.radius);
    if (s.kind == "ellipse") {
        if (dim != 2) throw SchemaViolation(r.key("kind"), "ellipse needs dim 2");
        positive("a", s.a);
        positive("b", s.b);
    }
    if (s.kind == "radial_values") {
        s.values = r.numbers("values", r.require("values"));
        for (double v : s.values)
            if (!(std::isfinite(v) && v > 0.0)) throw SchemaViolation(r.key("values"), "must all be > 0");
    }
    if (s.kind == "points") {
        if (dim != 2) throw SchemaViolation(r.key("kind"), "points need dim 2");
        const json& pts = r.require("points");
        if (!pts.is_array()) throw SchemaViolation(r.key("points"), "must be an array of [x, y] pairs");
        for (const json& p : pts) {
            std::vector<double> xy = r.numbers("points", p);
            if (xy.size() != 2) throw SchemaViolation(r.key("points"), "must be an array of [x, y] pairs");
            s.points.push_back(std::move(xy));
        }
    }

    if (s.kind == "points") {
        s.n = static_cast<int>(s.points.size());
    } else if (s.kind != "radial_values" || dim == 3) {
        r.integer("n", s.n);
    }
    if (dim == 3) {
        r.integer("n_phi", s.n_phi);
        if (s.n_phi < 4) throw SchemaViolation(r.key("n_phi"), "must be >= 4");
        if (s.n % 2) throw SchemaViolation(r.key("n"), "must be even on a lat-long grid");
    }
    if (s.kind == "radial_values") {
        const std::size_t expected = dim == 2 ? s.values.size() : static_cast<std::size_t>(s.n) * s.n_phi;
        if (dim == 2) s.n = static_cast<int>(expected);
        if (s.values.size() != expected) throw SchemaViolation(r.key("values"), "must have n * n_phi entries");
    }
    if (s.n < 16) throw SchemaViolation(r.key(s.kind == "points" ? "points" : "n"), "must have at least 16 vertices");
    r.reject_unknown();
    return s;
}

FlowConfig read_flow(Reader r) {
    FlowConfig f;
    const std::string scheme = r.string("scheme", "");
    if (scheme.empty()) throw SchemaViolation(r.key("scheme"), "is required");
    try {
        f.scheme = scheme_from_string(scheme);
    } catch (const Error&) {
        throw SchemaViolation(r.key("scheme"), "must be one of radial_graph, parametric_curve, level_set");
    }
    if (!r.has("t_end")) throw SchemaViolation(r.key("t_end"), "is required");
    r.number("t_end", f.t_end);
    r.number("cfl", f.cfl);
    r.number("r_stop", f.r_stop);
    r.number("h_cap", f.h_cap);
    r.integer("snapshot_every", f.snapshot_every);
    r.boolean("tangential_redistribution", f.tangential_redistribution);
    if (r.has("fixed_dt")) {
        double dt = 0.0;
        r.number("fixed_dt", dt);
        f.fixed_dt = dt;
    }
    if (r.has("level_set")) {
        Reader ls = r.object("level_set");
        ls.number("dx", f.level_set.dx);
        ls.number("margin", f.level_set.margin);
        ls.integer("reinit_every", f.level_set.reinit_every);
        ls.integer("reinit_iterations", f.level_set.reinit_iterations);
        ls.integer("rays", f.level_set.rays);
        ls.reject_unknown();
    }
    r.reject_unknown();
    f.validate();
    return f;
}

VerifySpec read_verify(Reader r) {
    VerifySpec v;
    r.integer("evolution_steps", v.evolution_steps);
    if (v.evolution_steps < 3) throw SchemaViolation(r.key("evolution_steps"), "must be >= 3");
    if (r.has("comparison")) {
        Reader c = r.object("comparison");
        c.number("inner_radius", v.comparison.inner_radius);
        c.number("outer_radius", v.comparison.outer_radius);
        if (!(v.comparison.inner_radius > 0.0)) throw SchemaViolation(c.key("inner_radius"), "must be > 0");
        if (!(v.comparison.outer_radius > v.comparison.inner_radius)) {
            throw SchemaViolation(c.key("outer_radius"), "must exceed inner_radius");
        }
        c.reject_unknown();
    }
    r.reject_unknown();
    return v;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaViolation("<root>", std::string("invalid JSON: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// -- writing -----------------------------------------------------------------

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ojson vec_json(const VecN& v) {
    ojson a = ojson::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

ojson norm_json(const NormSpec& s) {
    ojson j;
    j["family"] = std::string(to_string(s.family));
    j["dim"] = s.dim;
    if (s.family == NormFamily::randers) j["b"] = s.b;
    if (s.family == NormFamily::lp_smooth) {
        j["p"] = s.p;
        j["epsilon"] = s.epsilon;
    }
    j["derivative_mode"] = std::string(to_string(s.derivative_mode));
    return j;
}

ojson config_json(const RunConfigFile& c) {
    ojson j;
    j["norm"] = norm_json(c.norm);

    const ShapeSpec& s = c.initial;
    ojson init;
    init["kind"] = s.kind;
    init["center"] = s.center;
    if (s.kind != "points" && (s.kind != "radial_values" || c.norm.dim == 3)) init["n"] = s.n;
    if (c.norm.dim == 3) init["n_phi"] = s.n_phi;
    if (s.kind == "circle" || s.kind == "wulff") init["radius"] = s.radius;
    if (s.kind == "ellipse") {
        init["a"] = s.a;
        init["b"] = s.b;
    }
    if (s.kind == "radial_values") init["values"] = s.values;
    if (s.kind == "points") init["points"] = s.points;
    j["initial"] = init;

    const FlowConfig& f = c.flow;
    ojson flow;
    flow["scheme"] = std::string(to_string(f.scheme));
    flow["cfl"] = f.cfl;
    flow["t_end"] = f.t_end;
    flow["r_stop"] = f.r_stop;
    flow["h_cap"] = f.h_cap;
    flow["snapshot_every"] = f.snapshot_every;
    flow["tangential_redistribution"] = f.tangential_redistribution;
    if (f.fixed_dt) flow["fixed_dt"] = *f.fixed_dt;
    flow["level_set"] = {{"dx", f.level_set.dx},
                         {"margin", f.level_set.margin},
                         {"reinit_every", f.level_set.reinit_every},
                         {"reinit_iterations", f.level_set.reinit_iterations},
                         {"rays", f.level_set.rays}};
    j["flow"] = flow;
    j["output_dir"] = c.output_dir;
    j["verify"] = {{"evolution_steps", c.verify.evolution_steps},
                   {"comparison",
                    {{"inner_radius", c.verify.comparison.inner_radius},
                     {"outer_radius", c.verify.comparison.outer_radius}}}};
    return j;
}

ojson check_json(const CheckResult& r) {
    ojson j;
    j["name"] = r.name;
    j["pass"] = r.pass;
    j["observed"] = r.observed;
    j["bound"] = r.bound;
    j["margin"] = r.margin;
    ojson summary = ojson::object();
    for (const auto& [k, v] : r.summary) summary[k] = v;
    j["summary"] = summary;
    ojson details = ojson::array();
    for (const CheckDetail& d : r.details) details.push_back({{"t", d.t}, {"observed", d.observed}, {"bound", d.bound}});
    j["details"] = details;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

VecN to_vec(const std::vector<double>& v) {
    VecN out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
    return out;
}

}  // namespace

RunConfigFile parse_config_text(std::string_view text) {
    const json root = parse_json(text);
    Reader r(root, "");
    RunConfigFile c;
    c.norm = read_norm(r.object("norm"));
    c.initial = read_shape(r.object("initial"), c.norm.dim);
    c.flow = read_flow(r.object("flow"));
    c.output_dir = r.string("output_dir", c.output_dir);
    if (c.output_dir.empty()) throw SchemaViolation("output_dir", "must not be empty");
    if (r.has("verify")) c.verify = read_verify(r.object("verify"));
    r.reject_unknown();

    if (c.norm.dim == 3 && c.flow.scheme != Scheme::radial_graph) {
        throw SchemaViolation("flow.scheme", "surfaces (dim 3) need radial_graph");
    }
    if (c.flow.scheme == Scheme::radial_graph && c.initial.kind == "points") {
        throw SchemaViolation("initial.kind", "points need the parametric_curve or level_set scheme");
    }
    return c;
}

RunConfigFile parse_config(const std::filesystem::path& path) { return parse_config_text(read_file(path)); }

std::string config_to_json(const RunConfigFile& config) { return config_json(config).dump(2) + "\n"; }

NormSpec parse_norm_spec(std::string_view json_text) {
    const json root = parse_json(json_text);
    return read_norm(Reader(root, "norm"));
}

std::shared_ptr<const MinkowskiNorm> make_norm(const RunConfigFile& config) {
    return std::make_shared<MinkowskiNorm>(config.norm);
}

SurfaceState build_initial(const RunConfigFile& config) {
    return build_initial(config, config.flow.scheme == Scheme::radial_graph ? Representation::radial_graph
                                                                            : Representation::parametric_curve);
}

SurfaceState build_initial(const RunConfigFile& config, Representation rep) {
    const auto norm = make_norm(config);
    const ShapeSpec& s = config.initial;
    const VecN center = to_vec(s.center);
    const int dim = config.norm.dim;

    if (rep == Representation::parametric_curve) {
        if (dim != 2) throw Error(ErrorKind::InvalidParams, "parametric curves need dim 2");
        if (s.kind == "circle") return ellipse_parametric(norm, center, s.radius, s.radius, s.n);
        if (s.kind == "ellipse") return ellipse_parametric(norm, center, s.a, s.b, s.n);
        if (s.kind == "wulff") return wulff_parametric(norm, center, s.radius, s.n);
        if (s.kind == "points") {
            std::vector<VecN> pts;
            for (const auto& p : s.points) pts.push_back(to_vec(p));
            return make_parametric_curve(norm, center, std::move(pts));
        }
        const SurfaceState radial = build_initial(config, Representation::radial_graph);
        return make_parametric_curve(norm, center, radial.positions());
    }

    if (s.kind == "points") throw Error(ErrorKind::InvalidParams, "points cannot seed a radial graph");
    const DirectionGrid grid = dim == 2 ? build_inverse_sphere_grid(*norm, center, s.n)
                                        : build_inverse_sphere_grid(*norm, center, s.n, s.n_phi);
    if (s.kind == "radial_values") return make_radial_graph(norm, grid, s.values);
    if (s.kind == "wulff") return make_radial_graph(norm, grid, std::vector<double>(grid.directions.size(), s.radius));
    if (s.kind == "circle") {
        const double R = s.radius;
        return make_radial_graph(norm, grid, [R](const VecN& z) { return R / z.norm(); });
    }
    return ellipse_radial(norm, center, s.a, s.b, s.n);
}

RunRecord simulate(const RunConfigFile& config) { return run(build_initial(config), config.flow); }

std::string diagnostics_csv(const RunRecord& record) {
    std::string out = "t,area,H_min,H_max,k_min,r_min,r_max,dt\n";
    for (const DiagnosticsRow& d : record.diagnostics) {
        out += fmt(d.t) + ',' + fmt(d.area) + ',' + fmt(d.H_min) + ',' + fmt(d.H_max) + ',' + fmt(d.k_min) + ',' +
               fmt(d.r_min) + ',' + fmt(d.r_max) + ',' + fmt(d.dt) + '\n';
    }
    return out;
}

std::string snapshot_json(const Snapshot& s) {
    ojson j;
    j["step"] = s.step;
    j["t"] = s.t;
    j["rep"] = s.rep;
    if (!s.r.empty()) j["r"] = s.r;
    if (!s.points.empty()) {
        ojson pts = ojson::array();
        for (const VecN& p : s.points) pts.push_back(vec_json(p));
        j["points"] = pts;
    }
    j["H"] = s.H;
    if (!s.dmu.empty()) j["dmu"] = s.dmu;
    j["k_min"] = s.k_min;
    j["area"] = s.area;
    j["h2_integral"] = s.h2_integral;
    return j.dump();
}

std::vector<std::filesystem::path> emit_outputs(const RunRecord& record, const RunConfigFile& config,
                                                const std::filesystem::path& dir, double wall_time_s) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::IoError, "cannot create output directory " + dir.string() +
                                            (ec ? ": " + ec.message() : std::string()));
    }
    const std::filesystem::path csv = dir / "diagnostics.csv";
    const std::filesystem::path nd = dir / "snapshots.ndjson";
    const std::filesystem::path meta = dir / "run_meta.json";

    write_file(csv, diagnostics_csv(record));
    std::string lines;
    for (const Snapshot& s : record.snapshots) lines += snapshot_json(s) + '\n';
    write_file(nd, lines);

    ojson m;
    m["config"] = config_json(config);
    m["stop"] = std::string(to_string(record.stop));
    m["error_kind"] = record.error_kind ? ojson(std::string(to_string(*record.error_kind))) : ojson(nullptr);
    m["message"] = record.message;
    m["steps"] = record.steps;
    m["halt_time"] = record.halt_time();
    m["snapshots"] = record.snapshots.size();
    m["wall_time_s"] = wall_time_s;
    write_file(meta, m.dump(2) + "\n");
    return {csv, nd, meta};
}

// -- verify suites -----------------------------------------------------------

namespace {

bool is_precondition(ErrorKind k) {
    switch (k) {
        case ErrorKind::WrongInitialData:
        case ErrorKind::InsufficientSnapshots:
        case ErrorKind::NotMeanConvex:
        case ErrorKind::NotConvexInitially:
        case ErrorKind::NotNestedInitially:
        case ErrorKind::RedistributionActive: return true;
        default: return false;
    }
}

RunRecord evolution_record(const RunConfigFile& config) {
    FlowConfig flow = config.flow;
    flow.snapshot_every = 1;
    if (flow.scheme != Scheme::parametric_curve) {
        throw Error(ErrorKind::RedistributionActive, "radial and level-set motion carries a tangential component");
    }
    const SurfaceState s = build_initial(config);
    const double dt = flow.fixed_dt ? *flow.fixed_dt : adaptive_dt(s, compute_geometry(s), flow.cfl);
    flow.t_end = std::min(config.flow.t_end, dt * config.verify.evolution_steps);
    return run(s, flow);
}

std::vector<RunRecord> comparison_records(const RunConfigFile& config) {
    RunConfigFile sphere = config;
    sphere.initial = ShapeSpec{};
    sphere.initial.kind = "wulff";
    sphere.initial.center = config.initial.center;
    sphere.initial.n = config.initial.n;
    sphere.initial.n_phi = config.initial.n_phi;
    sphere.initial.radius = config.verify.comparison.inner_radius;
    const SurfaceState inner = build_initial(sphere);
    sphere.initial.radius = config.verify.comparison.outer_radius;
    const SurfaceState outer = build_initial(sphere);
    return run_synchronized({inner, build_initial(config), outer}, config.flow);
}

}  // namespace

std::vector<SuiteEntry> run_verify_suite(const RunConfigFile& config, std::string_view suite) {
    static const std::vector<std::string> names{"wulff", "area", "hmin", "convexity", "comparison", "evolution"};
    const bool all = suite == "all";
    if (!all && std::find(names.begin(), names.end(), suite) == names.end()) {
        throw Error(ErrorKind::InvalidParams, "unknown suite '" + std::string(suite) + "'");
    }

    std::optional<RunRecord> main_record;
    auto record = [&]() -> const RunRecord& {
        if (!main_record) main_record = simulate(config);
        return *main_record;
    };

    std::vector<SuiteEntry> out;
    for (const std::string& name : names) {
        if (!all && name != suite) continue;
        SuiteEntry e;
        e.result.name = name == "wulff"       ? "wulff_selfsimilar"
                        : name == "area"      ? "area_identity"
                        : name == "hmin"      ? "hmin_bound"
                        : name == "evolution" ? "evolution_identities"
                                              : name;
        try {
            if (name == "wulff") e.result = check_wulff_selfsimilar(record());
            if (name == "area") e.result = check_area_identity(record());
            if (name == "hmin") e.result = check_hmin_bound(record());
            if (name == "convexity") e.result = check_convexity(record());
            if (name == "comparison") {
                if (config.flow.scheme == Scheme::level_set) {
                    e.error = "comparison runs need a curve scheme";
                    e.skipped = all;
                    out.push_back(std::move(e));
                    continue;
                }
                const auto recs = comparison_records(config);
                e.result = check_comparison(recs[0], recs[2], recs[1]);
            }
            if (name == "evolution") e.result = check_evolution_identities(evolution_record(config));
        } catch (const Error& err) {
            if (!is_precondition(err.kind())) throw;
            e.error = err.what();
            e.result.pass = false;
            e.skipped = all;
        }
        out.push_back(std::move(e));
    }
    return out;
}

bool suite_passed(const std::vector<SuiteEntry>& entries) {
    bool ran = false;
    for (const SuiteEntry& e : entries) {
        if (e.skipped) continue;
        ran = true;
        if (!e.result.pass) return false;
    }
    return ran;
}

std::string to_json(const CheckResult& result) { return check_json(result).dump(2); }

std::string to_json(const std::vector<SuiteEntry>& entries) {
    ojson a = ojson::array();
    for (const SuiteEntry& e : entries) {
        ojson j = check_json(e.result);
        j["skipped"] = e.skipped;
        if (!e.error.empty()) j["error"] = e.error;
        a.push_back(j);
    }
    return a.dump(2);
}

std::string to_json(const ValidationReport& r) {
    ojson j;
    j["spec"] = norm_json(r.spec);
    j["sample_count"] = r.sample_count;
    j["valid"] = r.valid;
    j["all_pass"] = r.all_pass();
    j["errors"] = r.errors;
    auto list = [](const std::vector<IdentityViolation>& v) {
        ojson a = ojson::array();
        for (const auto& i : v) {
            a.push_back({{"name", i.name}, {"max_violation", i.max_violation}, {"tolerance", i.tolerance}, {"pass", i.pass}});
        }
        return a;
    };
    j["identities"] = list(r.identities);
    j["cross_checks"] = list(r.cross_checks);
    j["min_eigenvalue"] = r.min_eigenvalue;
    return j.dump(2);
}

}  // namespace anisoflow
