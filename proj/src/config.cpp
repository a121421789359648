#include "openbilliard/config.hpp"

#include "openbilliard/errors.hpp"
#include "openbilliard/io.hpp"
#include "openbilliard/scattering.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace ob {

using nlohmann::json;

RunConfig RunConfig::paper()
{
    RunConfig c;
    c.geometry = BilliardGeometry::paper();
    return c;
}

ScalingMap RunConfig::primary_map() const
{
    return make_rotation_map(numerics.alpha, geometry.scaling_anchor, numerics.transition_width);
}

ScalingMap RunConfig::check_map() const
{
    return make_rotation_map(numerics.alpha_check, geometry.scaling_anchor, numerics.transition_width);
}

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ConfigError(what);
}

bool finite_all(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

void RunConfig::validate() const
{
    geometry.validate();
    const Numerics& n = numerics;
    require(n.h > 0, "numerics.h must be positive");
    const double h = snap_spacing(geometry, n.h);
    const int intervals = static_cast<int>(std::lround(geometry.guide_width / h));
    require(n.n_modes >= 1 && n.n_modes < intervals, "numerics.n_modes must lie in [1, W/h)");
    const double half_pi = std::numbers::pi / 2;
    require(n.alpha > 0 && n.alpha < half_pi, "numerics.alpha must lie in (0, pi/2)");
    require(n.alpha_check > 0 && n.alpha_check < half_pi, "numerics.alpha_check must lie in (0, pi/2)");
    require(n.alpha != n.alpha_check, "numerics.alpha and numerics.alpha_check must differ");
    require(n.transition_width > 0, "numerics.transition_width must be positive");
    require(geometry.scaling_anchor - n.transition_width > geometry.truncation_x + h,
            "scaling layer does not fit between the truncation plane and x0");
    require(n.workers >= 1, "numerics.workers must be at least 1");

    const Tolerances& t = n.tolerances;
    for (double v : {t.eig_residual, t.ritz, t.unitarity, t.unitarity_hard, t.max_phase_step, t.min_energy_step,
                     t.stable_abs, t.stable_rel, t.spacing_factor})
        require(v > 0 && std::isfinite(v), "all tolerances must be positive");

    const ModeBasis modes = mode_basis(geometry.guide_width, h, std::min(2, intervals - 1));
    require(finite_all(delay.lambdas), "delay.lambdas must be finite");
    require(delay.count >= 3, "delay.count must be at least 3");
    require(delay.energy_min < delay.energy_max, "delay energy range is empty");
    require(modes.size() >= 2 && delay.energy_min > modes.lattice_threshold[0] &&
                delay.energy_max < modes.lattice_threshold[1],
            "delay energy range must lie in the one-open-mode window");

    require(finite_all(poles.lambdas), "poles.lambdas must be finite");
    require(poles.energy_min < poles.energy_max, "poles energy window is empty");
    require(poles.scan_min <= poles.scan_max, "poles scan range is empty");
    require(poles.shift_spacing > 0, "poles.shift_spacing must be positive");
    require(poles.eig_count >= 1, "poles.eig_count must be at least 1");

    require(std::isfinite(trace.lambda_from) && std::isfinite(trace.lambda_to), "trace lambdas must be finite");
    require(finite_all(trace.seeds), "trace.seeds must be finite");
    require(trace.min_step > 0 && trace.min_step <= trace.initial_step, "need 0 < trace.min_step <= initial_step");
    require(trace.max_move > 0 && trace.tracking_radius >= trace.max_move,
            "need 0 < trace.max_move <= tracking_radius");
    require(trace.eig_count >= 1, "trace.eig_count must be at least 1");

    require(finite_all(gamow.lambdas), "gamow.lambdas must be finite");
    require(gamow.m_max >= 1 && gamow.n_max >= 1, "gamow.m_max and n_max must be at least 1");
    require(gamow.cutoff >= 0, "gamow.cutoff must be non-negative");
    require(!output.empty(), "output directory must be set");
}

namespace {

// Reads `key` into `out` when present; a missing key is an error unless
// `optional`. Type mismatches surface as ConfigError naming the key.
class Reader {
public:
    Reader(const json& obj, std::string prefix, bool optional, std::set<std::string> keys)
        : obj_(obj), prefix_(std::move(prefix)), optional_(optional)
    {
        require(obj_.is_object(), "'" + prefix_ + "' must be an object");
        for (const auto& item : obj_.items())
            require(keys.count(item.key()) != 0, "unknown key '" + prefix_ + "." + item.key() + "'");
    }

    template <class T>
    void operator()(const char* key, T& out) const
    {
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            require(optional_, "missing key '" + prefix_ + "." + key + "'");
            return;
        }
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError("bad value for '" + prefix_ + "." + key + "'");
        }
    }

    const json* child(const char* key) const
    {
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            require(optional_, "missing block '" + prefix_ + "." + key + "'");
            return nullptr;
        }
        return &*it;
    }

private:
    const json& obj_;
    std::string prefix_;
    bool optional_;
};

void read_geometry(const json& j, bool optional, BilliardGeometry& g)
{
    Reader r(j, "geometry", optional,
             {"box_length", "box_height", "guide_width", "guide_offset", "barrier_x", "barrier_height",
              "truncation_x", "scaling_anchor"});
    r("box_length", g.box_length);
    r("box_height", g.box_height);
    r("guide_width", g.guide_width);
    r("guide_offset", g.guide_offset);
    std::vector<double> barrier{g.barrier_x.min, g.barrier_x.max};
    r("barrier_x", barrier);
    require(barrier.size() == 2, "geometry.barrier_x must be [min, max]");
    g.barrier_x = {barrier[0], barrier[1]};
    r("barrier_height", g.barrier_height);
    r("truncation_x", g.truncation_x);
    r("scaling_anchor", g.scaling_anchor);
}

void read_tolerances(const json& j, bool optional, Tolerances& t)
{
    Reader r(j, "numerics.tolerances", optional,
             {"eig_residual", "ritz", "unitarity", "unitarity_hard", "max_phase_step", "min_energy_step",
              "stable_abs", "stable_rel", "spacing_factor"});
    r("eig_residual", t.eig_residual);
    r("ritz", t.ritz);
    r("unitarity", t.unitarity);
    r("unitarity_hard", t.unitarity_hard);
    r("max_phase_step", t.max_phase_step);
    r("min_energy_step", t.min_energy_step);
    r("stable_abs", t.stable_abs);
    r("stable_rel", t.stable_rel);
    r("spacing_factor", t.spacing_factor);
}

void read_numerics(const json& j, bool optional, Numerics& n)
{
    Reader r(j, "numerics", optional,
             {"h", "n_modes", "alpha", "alpha_check", "transition_width", "seed", "workers", "tolerances"});
    r("h", n.h);
    r("n_modes", n.n_modes);
    r("alpha", n.alpha);
    r("alpha_check", n.alpha_check);
    r("transition_width", n.transition_width);
    r("seed", n.seed);
    r("workers", n.workers);
    if (const json* t = r.child("tolerances"))
        read_tolerances(*t, optional, n.tolerances);
}

void read_sweeps(const json& root, RunConfig& c)
{
    if (auto it = root.find("delay"); it != root.end()) {
        Reader r(*it, "delay", true, {"lambdas", "energy_min", "energy_max", "count"});
        r("lambdas", c.delay.lambdas);
        r("energy_min", c.delay.energy_min);
        r("energy_max", c.delay.energy_max);
        r("count", c.delay.count);
    }
    if (auto it = root.find("poles"); it != root.end()) {
        Reader r(*it, "poles", true,
                 {"lambdas", "energy_min", "energy_max", "scan_min", "scan_max", "shift_spacing", "shift_imag",
                  "eig_count"});
        r("lambdas", c.poles.lambdas);
        r("energy_min", c.poles.energy_min);
        r("energy_max", c.poles.energy_max);
        r("scan_min", c.poles.scan_min);
        r("scan_max", c.poles.scan_max);
        r("shift_spacing", c.poles.shift_spacing);
        r("shift_imag", c.poles.shift_imag);
        r("eig_count", c.poles.eig_count);
    }
    if (auto it = root.find("trace"); it != root.end()) {
        Reader r(*it, "trace", true,
                 {"lambda_from", "lambda_to", "seeds", "initial_step", "min_step", "max_move", "tracking_radius",
                  "eig_count"});
        r("lambda_from", c.trace.lambda_from);
        r("lambda_to", c.trace.lambda_to);
        r("seeds", c.trace.seeds);
        r("initial_step", c.trace.initial_step);
        r("min_step", c.trace.min_step);
        r("max_move", c.trace.max_move);
        r("tracking_radius", c.trace.tracking_radius);
        r("eig_count", c.trace.eig_count);
    }
    if (auto it = root.find("gamow"); it != root.end()) {
        Reader r(*it, "gamow", true, {"lambdas", "m_max", "n_max", "cutoff"});
        r("lambdas", c.gamow.lambdas);
        r("m_max", c.gamow.m_max);
        r("n_max", c.gamow.n_max);
        r("cutoff", c.gamow.cutoff);
    }
}

} // namespace

RunConfig parse_config(const std::string& json_text, bool use_paper_defaults)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    require(root.is_object(), "configuration must be a JSON object");
    Reader top(root, "", true, {"defaults", "geometry", "numerics", "delay", "poles", "trace", "gamow", "output"});

    std::string defaults;
    top("defaults", defaults);
    require(defaults.empty() || defaults == "paper", "unknown defaults preset '" + defaults + "'");
    const bool optional = use_paper_defaults || defaults == "paper";

    RunConfig c = RunConfig::paper();
    const json empty = json::object();
    auto block = [&](const char* key) -> const json& {
        if (root.contains(key))
            return root[key];
        require(optional, std::string("missing block '") + key + "'");
        return empty;
    };
    read_geometry(block("geometry"), optional, c.geometry);
    read_numerics(block("numerics"), optional, c.numerics);
    read_sweeps(root, c);
    top("output", c.output);
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path, bool use_paper_defaults)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, use_paper_defaults);
}

std::string serialize_config(const RunConfig& c)
{
    const auto& g = c.geometry;
    const auto& n = c.numerics;
    const auto& t = n.tolerances;
    json j;
    j["geometry"] = {{"box_length", g.box_length},       {"box_height", g.box_height},
                     {"guide_width", g.guide_width},     {"guide_offset", g.guide_offset},
                     {"barrier_x", {g.barrier_x.min, g.barrier_x.max}},
                     {"barrier_height", g.barrier_height}, {"truncation_x", g.truncation_x},
                     {"scaling_anchor", g.scaling_anchor}};
    j["numerics"] = {{"h", n.h},
                     {"n_modes", n.n_modes},
                     {"alpha", n.alpha},
                     {"alpha_check", n.alpha_check},
                     {"transition_width", n.transition_width},
                     {"seed", n.seed},
                     {"workers", n.workers},
                     {"tolerances",
                      {{"eig_residual", t.eig_residual},
                       {"ritz", t.ritz},
                       {"unitarity", t.unitarity},
                       {"unitarity_hard", t.unitarity_hard},
                       {"max_phase_step", t.max_phase_step},
                       {"min_energy_step", t.min_energy_step},
                       {"stable_abs", t.stable_abs},
                       {"stable_rel", t.stable_rel},
                       {"spacing_factor", t.spacing_factor}}}};
    j["delay"] = {{"lambdas", c.delay.lambdas},
                  {"energy_min", c.delay.energy_min},
                  {"energy_max", c.delay.energy_max},
                  {"count", c.delay.count}};
    j["poles"] = {{"lambdas", c.poles.lambdas},         {"energy_min", c.poles.energy_min},
                  {"energy_max", c.poles.energy_max},   {"scan_min", c.poles.scan_min},
                  {"scan_max", c.poles.scan_max},       {"shift_spacing", c.poles.shift_spacing},
                  {"shift_imag", c.poles.shift_imag},   {"eig_count", c.poles.eig_count}};
    j["trace"] = {{"lambda_from", c.trace.lambda_from},
                  {"lambda_to", c.trace.lambda_to},
                  {"seeds", c.trace.seeds},
                  {"initial_step", c.trace.initial_step},
                  {"min_step", c.trace.min_step},
                  {"max_move", c.trace.max_move},
                  {"tracking_radius", c.trace.tracking_radius},
                  {"eig_count", c.trace.eig_count}};
    j["gamow"] = {{"lambdas", c.gamow.lambdas},
                  {"m_max", c.gamow.m_max},
                  {"n_max", c.gamow.n_max},
                  {"cutoff", c.gamow.cutoff}};
    j["output"] = c.output;
    return j.dump(2) + "\n";
}

std::uint64_t config_hash(const RunConfig& config)
{
    RunConfig physics = config;
    physics.output.clear();
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char ch : serialize_config(physics)) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    return hash;
}

} // namespace ob
