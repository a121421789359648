#pragma once

#include "openbilliard/geometry.hpp"
#include "openbilliard/linear_solver.hpp"
#include "openbilliard/operator.hpp"

#include <functional>
#include <vector>

namespace ob {

/// Transversal sine modes of the guide sampled on its interior rows.
struct ModeBasis {
    double width = 0.0;
    double h = 0.0;
    int rows = 0;                          // interior guide rows, W / h - 1
    std::vector<double> threshold;         // (n pi / W)^2, n = 1..n_max
    std::vector<double> lattice_threshold; // (2 / h^2)(1 - cos(n pi h / W))
    std::vector<std::vector<double>> samples;  // u_n(y_j) = sin(n pi j h / W), j = 1..rows

    int size() const { return static_cast<int>(threshold.size()); }

    /// Discrete longitudinal wavenumber of mode n (1-based) at energy E:
    /// real k with cos(k h) = 1 + h^2 (mu_n - E) / 2 for open modes,
    /// purely imaginary i kappa with cosh(kappa h) = ... for closed ones.
    cdouble lattice_wavenumber(int n, double energy) const;
    /// Continuum wavenumber sqrt(E - (n pi / W)^2), imaginary when closed.
    cdouble continuum_wavenumber(int n, double energy) const;

    /// Plain grid inner product h * sum_j u_a(y_j) u_b(y_j).
    double inner(int a, int b) const;
};

/// Throws std::invalid_argument unless 1 <= n_max < W / h.
ModeBasis mode_basis(double width, double h, int n_max);

struct ScatteringPoint {
    double energy = 0.0;
    double k = 0.0;               // continuum wavenumber of mode 1
    cdouble reflection;           // R, reference plane x = 0
    double theta_unwrapped = 0.0;
    double tau_w = 0.0;
    double unitarity_residual = 0.0;  // | |R| - 1 |
};

struct ScatteringSolution {
    ScatteringPoint point;
    Vector field;  // on grid nodes, incoming amplitude 1
};

/// Real-energy scattering solver for one coupling lambda. The unscaled
/// operator is assembled once; each energy adds the mode-matching closure on
/// the column next to the truncation plane and factorizes.
class ScatteringSolver {
public:
    ScatteringSolver(const Grid& grid, double lambda, int n_modes = 8);

    const Grid& grid() const { return *grid_; }
    double lambda() const { return lambda_; }
    const ModeBasis& modes() const { return modes_; }

    /// Open window (pi/W)^2 < E < (2 pi/W)^2 using lattice thresholds.
    bool in_window(double energy) const;

    /// Throws SingularSystem, UnitarityBreach (residual above hard_limit) or
    /// std::domain_error outside the one-open-mode window.
    ScatteringSolution solve(double energy, double hard_limit = 1e-2) const;

private:
    const Grid* grid_;
    double lambda_;
    int n_modes_;
    ModeBasis modes_;
    SparseMatrix base_;
    std::vector<int> column_;  // boundary column node indices, by row
};

ScatteringPoint solve_scattering(const Grid& grid, double lambda, double energy, int n_modes = 8);

/// Sets theta_unwrapped by choosing the branch that minimizes each step.
void unwrap_phase(std::vector<ScatteringPoint>& points);

/// Sets tau_w = dTheta/dE with the second-order three-point formula on a
/// possibly non-uniform mesh; one-sided at the ends. Needs >= 3 points.
void time_delay(std::vector<ScatteringPoint>& points);

struct SweepOptions {
    double max_phase_step = 1.5707963267948966;  // pi / 2
    double min_energy_step = 1e-8;
    int workers = 1;
};

/// Solves at `energies` (sorted ascending), bisects every interval whose raw
/// phase step exceeds max_phase_step, then unwraps and differentiates.
/// Throws BranchAmbiguity if bisection reaches min_energy_step.
std::vector<ScatteringPoint> sweep_delay(const std::function<ScatteringPoint(double)>& solve,
                                         std::vector<double> energies, const SweepOptions& options = {});

std::vector<ScatteringPoint> sweep_delay(const ScatteringSolver& solver, std::vector<double> energies,
                                         const SweepOptions& options = {});

/// Uniform mesh of `count` points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

} // namespace ob
