#pragma once

#include "openbilliard/eigs.hpp"
#include "openbilliard/geometry.hpp"
#include "openbilliard/scaling.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ob {

enum class Classification { Pole, Continuum, Unresolved };

const char* to_string(Classification c);

struct ResonancePole {
    cdouble energy;       // E_r - i Gamma / 2
    double lambda = 0.0;
    cdouble theta_used{1.0, 0.0};
    double residual = 0.0;
    Classification classification = Classification::Unresolved;
    std::shared_ptr<const Vector> eigenvector;

    double gamma() const { return -2.0 * energy.imag(); }
};

/// Rotated continuum of the truncated guide: half-lines starting at the
/// lattice thresholds mu_n with direction exp(-2 i alpha).
struct ContinuumModel {
    std::vector<double> thresholds;
    double alpha = 0.0;
    double guide_length = 0.0;  // length of the guide; sets the level spacing

    /// Distance from z to the nearest half-line.
    double distance(cdouble z) const;
    /// Level spacing of the discrete continuum near z, taken on the nearest line:
    /// (pi / L)(2 sqrt(t) + pi / L) at line parameter t.
    double local_spacing(cdouble z) const;
};

ContinuumModel continuum_model(const Grid& grid, const ScalingMap& map, int n_lines = 4);

struct ClassifyOptions {
    double spacing_factor = 3.0;
    double stable_abs = 1e-2;
    double stable_rel = 0.05;  // of Gamma
};

/// Classifies `primary` (computed at the primary angle) against `check`
/// (same grid and lambda, different angle). The distance-to-continuum test is
/// applied in whichever run has the larger rotation.
std::vector<Classification> classify(const std::vector<cdouble>& primary, const ContinuumModel& primary_model,
                                     const std::vector<cdouble>& check, const ContinuumModel& check_model,
                                     const ClassifyOptions& options = {});

struct PoleSearchOptions {
    int count = 16;
    EigsOptions eigs;
    ClassifyOptions classify;
};

/// Eigenvalues of the scaled operator near `shifts` at both angles,
/// classified; entries are the primary-angle candidates sorted by Re E.
std::vector<ResonancePole> find_poles(const Grid& grid, double lambda, const ScalingMap& primary,
                                      const ScalingMap& check, const std::vector<cdouble>& shifts,
                                      const PoleSearchOptions& options = {});

/// Picks, for each seed energy, a distinct POLE from `poles` minimizing the
/// total squared distance. Throws std::runtime_error if too few poles.
std::vector<ResonancePole> match_seeds(const std::vector<ResonancePole>& poles, const std::vector<cdouble>& seeds);

struct TrajectoryPoint {
    double lambda = 0.0;
    cdouble energy;
    double residual = 0.0;
    Classification classification = Classification::Pole;
    bool collision = false;
};

struct PoleTrajectory {
    int branch_id = 0;
    std::vector<TrajectoryPoint> points;
    bool lost_track = false;
};

struct TraceOptions {
    double initial_step = 1.0;
    double min_step = 0.01;
    double max_move = 0.25;
    double tracking_radius = 0.5;
    int count = 6;
    int workers = 1;
    EigsOptions eigs;
};

/// Continues each seed from lambda_from to lambda_to on a shared adaptive
/// lambda grid. The step halves whenever a pole moves more than max_move and
/// is quartered after a collision; LostTrack ends a trajectory.
std::vector<PoleTrajectory> trace_poles(const Grid& grid, const ScalingMap& map, double lambda_from,
                                        double lambda_to, const std::vector<cdouble>& seeds,
                                        const TraceOptions& options = {});

} // namespace ob
