#include "openbilliard/commands.hpp"

#include "openbilliard/errors.hpp"
#include "openbilliard/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ob {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Run {
public:
    Run(const char* name, const RunConfig& config, const CommandOptions& options)
        : name_(name), config_(config), options_(options), start_(std::chrono::steady_clock::now())
    {
        config_.validate();
        std::error_code ec;
        fs::create_directories(config_.output, ec);
        if (ec)
            throw IoError("cannot create output directory " + config_.output + ": " + ec.message());
    }

    fs::path path(const std::string& file) const { return fs::path(config_.output) / file; }

    void write(const std::string& file, const std::string& text)
    {
        write_atomic(path(file), text);
        result_.files.push_back(path(file));
    }

    void record(const fs::path& p) { result_.files.push_back(p); }

    void log(const std::string& line) const
    {
        if (options_.log)
            *options_.log << name_ << ": " << line << '\n';
    }

    void warn(const std::string& line)
    {
        result_.warnings.push_back(line);
        log("warning: " + line);
    }

    CommandResult finish(const Grid* grid)
    {
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config_)));
        json m;
        m["command"] = name_;
        m["config_hash"] = hash;
        if (grid) {
            m["grid"] = {{"h_requested", config_.numerics.h},
                         {"h", grid->h()},
                         {"nodes", grid->size()},
                         {"billiard_nodes", grid->count(Region::Billiard)}};
        }
        json files = json::array();
        for (const auto& f : result_.files)
            files.push_back(f.filename().string());
        m["files"] = files;
        m["warnings"] = result_.warnings;
        if (options_.record_timing)
            m["timing_seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write(std::string(name_) + "_manifest.json", m.dump(2) + "\n");
        return result_;
    }

private:
    const char* name_;
    const RunConfig& config_;
    const CommandOptions& options_;
    std::chrono::steady_clock::time_point start_;
    CommandResult result_;
};

EigsOptions eigs_options(const RunConfig& c)
{
    EigsOptions o;
    o.seed = c.numerics.seed;
    o.ritz_tol = c.numerics.tolerances.ritz;
    o.residual_tol = c.numerics.tolerances.eig_residual;
    return o;
}

PoleSearchOptions pole_options(const RunConfig& c, int count)
{
    PoleSearchOptions o;
    o.count = count;
    o.eigs = eigs_options(c);
    o.classify.spacing_factor = c.numerics.tolerances.spacing_factor;
    o.classify.stable_abs = c.numerics.tolerances.stable_abs;
    o.classify.stable_rel = c.numerics.tolerances.stable_rel;
    return o;
}

TraceOptions trace_options(const RunConfig& c)
{
    TraceOptions o;
    o.initial_step = c.trace.initial_step;
    o.min_step = c.trace.min_step;
    o.max_move = c.trace.max_move;
    o.tracking_radius = c.trace.tracking_radius;
    o.count = c.trace.eig_count;
    o.workers = c.numerics.workers;
    o.eigs = eigs_options(c);
    return o;
}

std::string energy_label(cdouble e)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f%+.6fi", e.real(), e.imag());
    return buf;
}

} // namespace

Grid make_grid(const RunConfig& config)
{
    return build_grid(config.geometry, snap_spacing(config.geometry, config.numerics.h));
}

std::string lambda_label(double lambda)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", lambda);
    return buf;
}

std::vector<cdouble> scan_shifts(const PoleSearchConfig& p)
{
    const double span = p.scan_max - p.scan_min;
    const int n = std::max(1, static_cast<int>(std::ceil(span / p.shift_spacing - 1e-9)));
    std::vector<cdouble> out;
    for (int k = 0; k < n; ++k)
        out.emplace_back(p.scan_min + (k + 0.5) * span / n, p.shift_imag);
    return out;
}

std::string pole_csv_header() { return "lambda,ReE,ImE,Gamma,residual,classification,branch_id\n"; }

std::string pole_csv_row(double lambda, cdouble e, double residual, Classification cls, int branch_id)
{
    return format_double(lambda) + ',' + format_double(e.real()) + ',' + format_double(e.imag()) + ',' +
           format_double(-2.0 * e.imag()) + ',' + format_double(residual) + ',' + to_string(cls) + ',' +
           std::to_string(branch_id) + '\n';
}

CommandResult cmd_sweep_delay(const RunConfig& config, const CommandOptions& options)
{
    Run run("delay", config, options);
    if (config.delay.lambdas.empty()) {
        run.warn("empty lambda list; nothing to do");
        return {{}, {"empty lambda list; nothing to do"}};
    }
    const Grid grid = make_grid(config);
    const auto& tol = config.numerics.tolerances;
    SweepOptions sweep;
    sweep.max_phase_step = tol.max_phase_step;
    sweep.min_energy_step = tol.min_energy_step;
    sweep.workers = config.numerics.workers;

    for (double lambda : config.delay.lambdas) {
        run.log("lambda = " + lambda_label(lambda));
        const ScatteringSolver solver(grid, lambda, config.numerics.n_modes);
        auto solve = [&](double e) {
            try {
                return solver.solve(e, tol.unitarity_hard).point;
            } catch (const SingularSystem&) {
                ScatteringPoint p = solver.solve(e * (1.0 + 1e-10), tol.unitarity_hard).point;
                p.energy = e;
                return p;
            }
        };
        const auto points = sweep_delay(
            solve, linspace(config.delay.energy_min, config.delay.energy_max, config.delay.count), sweep);

        std::string text = "E,ReR,ImR,Theta,tau_w,unitarity_residual\n";
        double worst = 0.0;
        for (const auto& p : points) {
            worst = std::max(worst, p.unitarity_residual);
            text += format_double(p.energy) + ',' + format_double(p.reflection.real()) + ',' +
                    format_double(p.reflection.imag()) + ',' + format_double(p.theta_unwrapped) + ',' +
                    format_double(p.tau_w) + ',' + format_double(p.unitarity_residual) + '\n';
        }
        if (worst > tol.unitarity)
            run.warn("lambda " + lambda_label(lambda) + ": max | |R| - 1 | = " + format_double(worst));
        run.write("delay_lambda_" + lambda_label(lambda) + ".csv", text);
    }
    return run.finish(&grid);
}

CommandResult cmd_find_poles(const RunConfig& config, const CommandOptions& options)
{
    Run run("poles", config, options);
    const Grid grid = make_grid(config);
    const auto opts = pole_options(config, config.poles.eig_count);
    const auto shifts = scan_shifts(config.poles);

    std::string text = pole_csv_header();
    for (double lambda : config.poles.lambdas) {
        run.log("lambda = " + lambda_label(lambda));
        const auto poles = find_poles(grid, lambda, config.primary_map(), config.check_map(), shifts, opts);
        int branch = 0;
        for (const auto& p : poles) {
            if (p.energy.real() < config.poles.energy_min || p.energy.real() > config.poles.energy_max)
                continue;
            const bool is_pole = p.classification == Classification::Pole;
            text += pole_csv_row(lambda, p.energy, p.residual, p.classification, is_pole ? branch++ : -1);
        }
    }
    run.write("poles.csv", text);
    return run.finish(&grid);
}

std::vector<ResonancePole> trace_seeds(const RunConfig& config, const Grid& grid)
{
    const double lambda = config.trace.lambda_from;
    const auto poles = find_poles(grid, lambda, config.primary_map(), config.check_map(), scan_shifts(config.poles),
                                  pole_options(config, config.poles.eig_count));
    if (config.trace.seeds.empty()) {
        std::vector<ResonancePole> out;
        for (const auto& p : poles)
            if (p.classification == Classification::Pole && p.energy.real() >= config.poles.energy_min &&
                p.energy.real() <= config.poles.energy_max)
                out.push_back(p);
        return out;
    }
    std::vector<cdouble> seeds(config.trace.seeds.begin(), config.trace.seeds.end());
    try {
        return match_seeds(poles, seeds);
    } catch (const std::runtime_error& e) {
        throw NoConvergence(std::string("seeding at lambda ") + lambda_label(lambda) + ": " + e.what());
    }
}

CommandResult cmd_trace(const RunConfig& config, const CommandOptions& options)
{
    Run run("trace", config, options);
    const Grid grid = make_grid(config);
    const auto seeded = trace_seeds(config, grid);
    std::vector<cdouble> seeds;
    for (const auto& p : seeded) {
        seeds.push_back(p.energy);
        run.log("seed " + energy_label(p.energy));
    }
    const auto traj = trace_poles(grid, config.primary_map(), config.trace.lambda_from, config.trace.lambda_to, seeds,
                                  trace_options(config));

    std::string text = pole_csv_header();
    for (const auto& t : traj) {
        if (t.lost_track)
            run.warn("branch " + std::to_string(t.branch_id) + " lost track after lambda " +
                     lambda_label(t.points.back().lambda));
        for (std::size_t k = 0; k < t.points.size(); ++k) {
            const auto& q = t.points[k];
            const double residual = k == 0 ? seeded[static_cast<std::size_t>(t.branch_id)].residual : q.residual;
            if (q.collision)
                run.warn("branch " + std::to_string(t.branch_id) + " collided at lambda " + lambda_label(q.lambda));
            text += pole_csv_row(q.lambda, q.energy, residual, q.classification, t.branch_id);
        }
    }
    run.write("trajectories.csv", text);
    return run.finish(&grid);
}

CommandResult cmd_gamow(const RunConfig& config, const CommandOptions& options)
{
    Run run("gamow", config, options);
    const Grid grid = make_grid(config);
    const auto seeded = trace_seeds(config, grid);
    std::vector<cdouble> current;
    for (const auto& p : seeded)
        current.push_back(p.energy);
    std::vector<bool> alive(current.size(), true);

    std::vector<double> targets = config.gamow.lambdas;
    const double from = config.trace.lambda_from;
    std::stable_sort(targets.begin(), targets.end(),
                     [&](double a, double b) { return std::abs(a - from) < std::abs(b - from); });
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

    const auto topts = trace_options(config);
    const auto popts = pole_options(config, config.trace.eig_count);
    std::string summary = "lambda,branch_id,ReE,ImE,classification,billiard_share,m,n,absC2\n";
    double at = from;
    for (double lambda : targets) {
        run.log("lambda = " + lambda_label(lambda));
        std::vector<cdouble> seeds;
        std::vector<std::size_t> ids;
        for (std::size_t b = 0; b < current.size(); ++b)
            if (alive[b]) {
                seeds.push_back(current[b]);
                ids.push_back(b);
            }
        if (seeds.empty())
            break;
        if (lambda != at) {
            const auto traj = trace_poles(grid, config.primary_map(), at, lambda, seeds, topts);
            for (std::size_t k = 0; k < ids.size(); ++k) {
                if (traj[k].lost_track) {
                    alive[ids[k]] = false;
                    run.warn("branch " + std::to_string(ids[k]) + " lost track before lambda " +
                             lambda_label(lambda));
                }
                current[ids[k]] = traj[k].points.back().energy;
            }
            at = lambda;
        }

        std::vector<cdouble> shifts;
        for (std::size_t b : ids)
            if (alive[b])
                shifts.push_back(current[b]);
        const auto poles = find_poles(grid, lambda, config.primary_map(), config.check_map(), shifts, popts);
        for (std::size_t b : ids) {
            if (!alive[b])
                continue;
            const ResonancePole* best = nullptr;
            for (const auto& p : poles)
                if (!best || std::abs(p.energy - current[b]) < std::abs(best->energy - current[b]))
                    best = &p;
            if (!best)
                continue;
            const std::string tag = "lambda_" + lambda_label(lambda) + "_branch_" + std::to_string(b);
            if (best->classification != Classification::Pole)
                run.warn(tag + " is " + to_string(best->classification));
            GamowState state;
            try {
                state = extract_gamow(*best, grid);
            } catch (const NullRestriction& e) {
                run.warn(tag + ": " + e.what());
                continue;
            }
            state.mixing = mixing_coefficients(state, config.gamow.m_max, config.gamow.n_max, config.gamow.cutoff);
            export_field(state, run.path("gamow_" + tag + ".txt"));
            run.record(run.path("gamow_" + tag + ".txt"));
            export_mixing(state.mixing, run.path("mixing_" + tag + ".csv"));
            run.record(run.path("mixing_" + tag + ".csv"));

            const MixingEntry top = state.mixing.empty() ? MixingEntry{} : state.mixing.front();
            summary += format_double(lambda) + ',' + std::to_string(b) + ',' + format_double(best->energy.real()) +
                       ',' + format_double(best->energy.imag()) + ',' + to_string(best->classification) + ',' +
                       format_double(billiard_share(*best->eigenvector, grid)) + ',' + std::to_string(top.m) + ',' +
                       std::to_string(top.n) + ',' + format_double(std::norm(top.coefficient)) + '\n';
        }
    }
    run.write("gamow_summary.csv", summary);
    return run.finish(&grid);
}

} // namespace ob
