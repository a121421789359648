#pragma once

#include "openbilliard/geometry.hpp"
#include "openbilliard/scaling.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ob {

struct Tolerances {
    double eig_residual = 1e-8;
    double ritz = 1e-13;
    double unitarity = 1e-3;       // reported; exceeding it only warns
    double unitarity_hard = 1e-2;  // exceeding it aborts the solve
    double max_phase_step = 1.5707963267948966;
    double min_energy_step = 1e-8;
    double stable_abs = 1e-2;
    double stable_rel = 0.05;
    double spacing_factor = 3.0;

    bool operator==(const Tolerances&) const = default;
};

struct Numerics {
    double h = 0.02;
    int n_modes = 8;
    double alpha = 0.3;
    double alpha_check = 0.4;
    double transition_width = 1.0;
    std::uint64_t seed = 20011;
    int workers = 1;
    Tolerances tolerances;

    bool operator==(const Numerics&) const = default;
};

struct DelaySweepConfig {
    std::vector<double> lambdas{44.0, 23.5, 0.0};
    double energy_min = 38.0;
    double energy_max = 40.0;
    int count = 200;

    bool operator==(const DelaySweepConfig&) const = default;
};

struct PoleSearchConfig {
    std::vector<double> lambdas{44.0};
    double energy_min = 38.0;  // reporting window
    double energy_max = 40.0;
    double scan_min = 37.0;    // shifts are spread over this range
    double scan_max = 41.0;
    double shift_spacing = 2.0;
    double shift_imag = -0.2;
    int eig_count = 16;

    bool operator==(const PoleSearchConfig&) const = default;
};

struct TraceConfig {
    double lambda_from = 44.0;
    double lambda_to = 0.0;
    std::vector<double> seeds{38.6, 38.8, 39.8};  // empty: every POLE in the pole window
    double initial_step = 1.0;
    double min_step = 0.01;
    double max_move = 0.25;
    double tracking_radius = 0.5;
    int eig_count = 6;

    bool operator==(const TraceConfig&) const = default;
};

struct GamowConfig {
    std::vector<double> lambdas{44.0, 23.5, 0.0};
    int m_max = 8;
    int n_max = 10;
    double cutoff = 1e-3;

    bool operator==(const GamowConfig&) const = default;
};

struct RunConfig {
    BilliardGeometry geometry;
    Numerics numerics;
    DelaySweepConfig delay;
    PoleSearchConfig poles;
    TraceConfig trace;
    GamowConfig gamow;
    std::string output = "out";

    static RunConfig paper();

    /// Throws ConfigError (or DegenerateGeometry / SnapFailure for the
    /// geometry block) when an invariant is violated.
    void validate() const;

    ScalingMap primary_map() const;
    ScalingMap check_map() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parses JSON text. With "defaults": "paper" (or use_paper_defaults), absent
/// fields take the reference values; otherwise the geometry and numerics
/// blocks must be complete. Unknown keys are rejected. Throws ConfigError.
RunConfig parse_config(const std::string& json_text, bool use_paper_defaults = false);
RunConfig load_config(const std::filesystem::path& path, bool use_paper_defaults = false);

/// Complete JSON form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// FNV-1a over serialize_config with the output directory blanked, so
/// relocated runs share a hash.
std::uint64_t config_hash(const RunConfig& config);

} // namespace ob
