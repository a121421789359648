#include "openbilliard/poles.hpp"

#include "openbilliard/operator.hpp"
#include "openbilliard/parallel.hpp"
#include "openbilliard/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ob {

using std::numbers::pi;

const char* to_string(Classification c)
{
    switch (c) {
    case Classification::Pole: return "POLE";
    case Classification::Continuum: return "CONTINUUM";
    case Classification::Unresolved: return "UNRESOLVED";
    }
    return "?";
}

namespace {

// Coordinates of z in the frame of the half-line from mu at angle -2 alpha.
cdouble line_frame(cdouble z, double mu, double alpha) { return (z - mu) * std::polar(1.0, 2.0 * alpha); }

double distance_to_line(cdouble z, double mu, double alpha)
{
    const cdouble w = line_frame(z, mu, alpha);
    return w.real() >= 0 ? std::abs(w.imag()) : std::abs(z - mu);
}

} // namespace

double ContinuumModel::distance(cdouble z) const
{
    double best = std::numeric_limits<double>::infinity();
    for (double mu : thresholds)
        best = std::min(best, distance_to_line(z, mu, alpha));
    return best;
}

double ContinuumModel::local_spacing(cdouble z) const
{
    double best = std::numeric_limits<double>::infinity();
    double t = 0.0;
    for (double mu : thresholds) {
        const double d = distance_to_line(z, mu, alpha);
        if (d < best) {
            best = d;
            t = std::max(0.0, line_frame(z, mu, alpha).real());
        }
    }
    const double q = pi / guide_length;
    return q * (2.0 * std::sqrt(t) + q);
}

ContinuumModel continuum_model(const Grid& grid, const ScalingMap& map, int n_lines)
{
    const auto& geo = grid.geometry();
    const int intervals = grid.guide_intervals();
    ContinuumModel model;
    model.alpha = std::arg(map.theta());
    model.guide_length = -geo.truncation_x;
    const ModeBasis modes = mode_basis(geo.guide_width, grid.h(), std::min(n_lines, intervals - 1));
    model.thresholds = modes.lattice_threshold;
    return model;
}

std::vector<Classification> classify(const std::vector<cdouble>& primary, const ContinuumModel& primary_model,
                                     const std::vector<cdouble>& check, const ContinuumModel& check_model,
                                     const ClassifyOptions& options)
{
    const std::size_t n = primary.size();
    std::vector<Classification> out(n, Classification::Unresolved);
    std::vector<int> partner(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < check.size(); ++j) {
            const double d = std::abs(primary[i] - check[j]);
            if (d < best) {
                best = d;
                partner[i] = static_cast<int>(j);
            }
        }
    }
    const bool primary_wider = std::abs(primary_model.alpha) >= std::abs(check_model.alpha);
    std::vector<bool> stable(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (partner[i] < 0)
            continue;
        const double gamma = std::max(0.0, -2.0 * primary[i].imag());
        const double moved = std::abs(primary[i] - check[static_cast<std::size_t>(partner[i])]);
        stable[i] = moved < std::max(options.stable_abs, options.stable_rel * gamma);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const cdouble z = primary[i];
        const bool near_line =
            primary_model.distance(z) <= options.spacing_factor * primary_model.local_spacing(z);
        if (!stable[i]) {
            out[i] = near_line ? Classification::Continuum : Classification::Unresolved;
            continue;
        }
        bool ambiguous = false;
        for (std::size_t k = 0; k < n; ++k)
            ambiguous = ambiguous || (k != i && stable[k] && partner[k] == partner[i]);
        const cdouble w = check[static_cast<std::size_t>(partner[i])];
        const cdouble far_z = primary_wider ? z : w;
        const ContinuumModel& far_model = primary_wider ? primary_model : check_model;
        const bool far = far_model.distance(far_z) > options.spacing_factor * far_model.local_spacing(far_z);
        if (ambiguous)
            out[i] = Classification::Unresolved;
        else if (far && z.imag() <= 0.0)
            out[i] = Classification::Pole;
        else
            out[i] = near_line ? Classification::Continuum : Classification::Unresolved;
    }
    return out;
}

namespace {

struct Candidate {
    cdouble value;
    double residual;
    bool converged;
    std::shared_ptr<const Vector> vector;
};

std::vector<Candidate> collect(const SparseMatrix& a, const std::vector<cdouble>& shifts, int count,
                               const EigsOptions& eigs)
{
    std::vector<Candidate> out;
    for (cdouble shift : shifts) {
        EigsResult r = eigs_near(a, shift, count, eigs);
        for (auto& p : r.pairs) {
            const bool dup = std::any_of(out.begin(), out.end(), [&](const Candidate& c) {
                return std::abs(c.value - p.value) <= 1e-8 * std::max(1.0, std::abs(p.value));
            });
            if (!dup)
                out.push_back({p.value, p.residual, p.converged, std::make_shared<const Vector>(std::move(p.vector))});
        }
    }
    std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
        return x.value.real() < y.value.real() || (x.value.real() == y.value.real() && x.value.imag() < y.value.imag());
    });
    return out;
}

} // namespace

std::vector<ResonancePole> find_poles(const Grid& grid, double lambda, const ScalingMap& primary,
                                      const ScalingMap& check, const std::vector<cdouble>& shifts,
                                      const PoleSearchOptions& options)
{
    const DiscreteOperator op_p = assemble_scaled(grid, lambda, primary);
    const DiscreteOperator op_c = assemble_scaled(grid, lambda, check);
    const auto cand_p = collect(op_p.matrix, shifts, options.count, options.eigs);
    const auto cand_c = collect(op_c.matrix, shifts, options.count, options.eigs);

    std::vector<cdouble> zp, zc;
    for (const auto& c : cand_p)
        zp.push_back(c.value);
    for (const auto& c : cand_c)
        zc.push_back(c.value);
    const auto classes =
        classify(zp, continuum_model(grid, primary), zc, continuum_model(grid, check), options.classify);

    std::vector<ResonancePole> out;
    for (std::size_t i = 0; i < cand_p.size(); ++i) {
        ResonancePole p;
        p.energy = cand_p[i].value;
        p.lambda = lambda;
        p.theta_used = primary.theta();
        p.residual = cand_p[i].residual;
        p.classification = cand_p[i].converged ? classes[i] : Classification::Unresolved;
        p.eigenvector = cand_p[i].vector;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<ResonancePole> match_seeds(const std::vector<ResonancePole>& poles, const std::vector<cdouble>& seeds)
{
    std::vector<const ResonancePole*> pool;
    for (const auto& p : poles)
        if (p.classification == Classification::Pole)
            pool.push_back(&p);
    if (pool.size() < seeds.size())
        throw std::runtime_error("fewer POLE candidates than seeds");

    // Exhaustive assignment; seed lists are tiny.
    std::vector<int> pick(seeds.size(), -1), best_pick;
    std::vector<bool> used(pool.size(), false);
    double best = std::numeric_limits<double>::infinity();
    auto search = [&](auto&& self, std::size_t s, double cost) -> void {
        if (cost >= best)
            return;
        if (s == seeds.size()) {
            best = cost;
            best_pick = pick;
            return;
        }
        for (std::size_t k = 0; k < pool.size(); ++k) {
            if (used[k])
                continue;
            used[k] = true;
            pick[s] = static_cast<int>(k);
            self(self, s + 1, cost + std::norm(pool[k]->energy - seeds[s]));
            used[k] = false;
        }
    };
    search(search, 0, 0.0);
    std::vector<ResonancePole> out;
    for (int k : best_pick)
        out.push_back(*pool[static_cast<std::size_t>(k)]);
    return out;
}

std::vector<PoleTrajectory> trace_poles(const Grid& grid, const ScalingMap& map, double lambda_from,
                                        double lambda_to, const std::vector<cdouble>& seeds,
                                        const TraceOptions& options)
{
    std::vector<PoleTrajectory> traj(seeds.size());
    for (std::size_t b = 0; b < seeds.size(); ++b) {
        traj[b].branch_id = static_cast<int>(b);
        traj[b].points.push_back({lambda_from, seeds[b], 0.0, Classification::Pole, false});
    }
    if (seeds.empty() || lambda_from == lambda_to)
        return traj;

    const double dir = lambda_to > lambda_from ? 1.0 : -1.0;
    const double span = std::abs(lambda_to - lambda_from);
    double travelled = 0.0;
    double step = options.initial_step;

    struct Trial {
        cdouble value;
        double residual;
        double move;
        bool converged;
    };

    while (travelled < span - 1e-12) {
        std::vector<std::size_t> active;
        for (std::size_t b = 0; b < traj.size(); ++b)
            if (!traj[b].lost_track)
                active.push_back(b);
        if (active.empty())
            break;

        const double this_step = std::min(step, span - travelled);
        const bool last = this_step >= span - travelled - 1e-12;
        const double lambda = last ? lambda_to : lambda_from + dir * (travelled + this_step);
        const DiscreteOperator op = assemble_scaled(grid, lambda, map);

        std::vector<Trial> trial(active.size());
        parallel_for(active.size(), options.workers, [&](std::size_t a) {
            const cdouble prev = traj[active[a]].points.back().energy;
            const EigsResult r = eigs_near(op.matrix, prev, options.count, options.eigs);
            const EigenPair* best = nullptr;
            for (const auto& p : r.pairs)
                if (!best || std::abs(p.value - prev) < std::abs(best->value - prev))
                    best = &p;
            trial[a] = {best->value, best->residual, std::abs(best->value - prev), best->converged};
        });

        const bool at_floor = step <= options.min_step * (1 + 1e-9);
        bool too_far = false;
        for (const auto& t : trial)
            too_far = too_far || t.move > options.max_move;
        std::vector<bool> collided(active.size(), false);
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t c = a + 1; c < active.size(); ++c)
                if (std::abs(trial[a].value - trial[c].value) <= 1e-9 * std::max(1.0, std::abs(trial[a].value)))
                    collided[a] = collided[c] = true;
        const bool any_collision = std::find(collided.begin(), collided.end(), true) != collided.end();

        if (!at_floor && any_collision) {
            step = std::max(options.min_step, step / 4);
            continue;
        }
        if (!at_floor && too_far) {
            step = std::max(options.min_step, step / 2);
            continue;
        }

        for (std::size_t a = 0; a < active.size(); ++a) {
            PoleTrajectory& tr = traj[active[a]];
            if (trial[a].move > options.tracking_radius) {
                tr.lost_track = true;
                continue;
            }
            const auto cls = trial[a].converged ? Classification::Pole : Classification::Unresolved;
            tr.points.push_back({lambda, trial[a].value, trial[a].residual, cls, collided[a]});
        }
        travelled += this_step;
        step = std::min(options.initial_step, 2 * step);
    }
    return traj;
}

} // namespace ob
