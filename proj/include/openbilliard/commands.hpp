#pragma once

#include "openbilliard/config.hpp"
#include "openbilliard/gamow.hpp"
#include "openbilliard/poles.hpp"
#include "openbilliard/scattering.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ob {

struct CommandOptions {
    bool record_timing = false;  // adds wall-clock seconds to the manifest
    std::ostream* log = nullptr; // progress and warnings; silent when null
};

struct CommandResult {
    std::vector<std::filesystem::path> files;  // in write order, manifest last
    std::vector<std::string> warnings;
};

/// Snapped spacing and grid for the configured geometry.
Grid make_grid(const RunConfig& config);

/// "44", "23.5", "0": shortest decimal used in file names.
std::string lambda_label(double lambda);

/// Shifts spread over [scan_min, scan_max], one per shift_spacing.
std::vector<cdouble> scan_shifts(const PoleSearchConfig& poles);

/// One delay CSV per lambda (E,ReR,ImR,Theta,tau_w,unitarity_residual) and
/// delay_manifest.json. An empty lambda list writes nothing and warns.
CommandResult cmd_sweep_delay(const RunConfig& config, const CommandOptions& options = {});

/// poles.csv with the classified eigenvalues inside the reporting window.
CommandResult cmd_find_poles(const RunConfig& config, const CommandOptions& options = {});

/// Seeds for tracing: candidates at trace.lambda_from matched to trace.seeds,
/// or every POLE inside the pole window when no seeds are configured.
std::vector<ResonancePole> trace_seeds(const RunConfig& config, const Grid& grid);

/// trajectories.csv, one block of rows per branch.
CommandResult cmd_trace(const RunConfig& config, const CommandOptions& options = {});

/// Follows the seeded branches through every gamow lambda and writes one
/// field file and one mixing CSV per (lambda, branch), plus gamow_summary.csv.
CommandResult cmd_gamow(const RunConfig& config, const CommandOptions& options = {});

/// CSV text shared by find-poles and trace-poles.
std::string pole_csv_header();
std::string pole_csv_row(double lambda, cdouble energy, double residual, Classification cls, int branch_id);

} // namespace ob
