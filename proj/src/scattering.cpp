#include "openbilliard/scattering.hpp"

#include "openbilliard/errors.hpp"
#include "openbilliard/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ob {

using std::numbers::pi;

ModeBasis mode_basis(double width, double h, int n_max)
{
    const int intervals = static_cast<int>(std::lround(width / h));
    if (n_max < 1 || n_max >= intervals)
        throw std::invalid_argument("mode_basis: need 1 <= n_max < W / h");
    ModeBasis basis;
    basis.width = width;
    basis.h = h;
    basis.rows = intervals - 1;
    for (int n = 1; n <= n_max; ++n) {
        const double q = n * pi / width;
        basis.threshold.push_back(q * q);
        basis.lattice_threshold.push_back(2.0 / (h * h) * (1.0 - std::cos(q * h)));
        std::vector<double> u(basis.rows);
        for (int j = 1; j <= basis.rows; ++j)
            u[j - 1] = std::sin(n * pi * j / intervals);
        basis.samples.push_back(std::move(u));
    }
    return basis;
}

cdouble ModeBasis::lattice_wavenumber(int n, double energy) const
{
    const double c = 1.0 + 0.5 * h * h * (lattice_threshold.at(n - 1) - energy);
    if (c > 1.0)
        return {0.0, std::acosh(c) / h};
    if (c < -1.0)
        throw std::domain_error("energy above the lattice band");
    return {std::acos(c) / h, 0.0};
}

cdouble ModeBasis::continuum_wavenumber(int n, double energy) const
{
    return std::sqrt(cdouble(energy - threshold.at(n - 1), 0.0));
}

double ModeBasis::inner(int a, int b) const
{
    double s = 0.0;
    for (int j = 0; j < rows; ++j)
        s += samples.at(a - 1)[j] * samples.at(b - 1)[j];
    return s * h;
}

ScatteringSolver::ScatteringSolver(const Grid& grid, double lambda, int n_modes)
    : grid_(&grid),
      lambda_(lambda),
      n_modes_(n_modes),
      modes_(mode_basis(grid.geometry().guide_width, grid.h(), std::max(n_modes, 2))),
      base_(assemble_unscaled(grid, lambda).matrix),
      column_(grid.boundary_column())
{
    if (!grid.has_guide())
        throw std::invalid_argument("scattering needs the waveguide");
}

bool ScatteringSolver::in_window(double energy) const
{
    return energy > modes_.lattice_threshold[0] && energy < modes_.lattice_threshold[1];
}

ScatteringSolution ScatteringSolver::solve(double energy, double hard_limit) const
{
    if (!in_window(energy))
        throw std::domain_error("energy outside the one-open-mode window");

    const double h = grid_->h();
    const double inv_h2 = 1.0 / (h * h);
    const int rows = modes_.rows;
    const double norm = 0.5 * (rows + 1);  // sum_j u_n(j)^2
    const double x1 = grid_->x_of(1);

    // Column-to-plane transfer factor per retained mode.
    std::vector<cdouble> rho(n_modes_);
    const double k1 = modes_.lattice_wavenumber(1, energy).real();
    rho[0] = std::polar(1.0, k1 * h);
    for (int n = 2; n <= n_modes_; ++n)
        rho[n - 1] = std::exp(-modes_.lattice_wavenumber(n, energy).imag() * h);

    std::vector<Eigen::Triplet<cdouble>> closure;
    closure.reserve(static_cast<std::size_t>(rows) * rows);
    for (int a = 0; a < rows; ++a)
        for (int b = 0; b < rows; ++b) {
            cdouble s = 0.0;
            for (int n = 0; n < n_modes_; ++n)
                s += rho[n] * modes_.samples[n][a] * modes_.samples[n][b];
            closure.emplace_back(column_[a], column_[b], -s * inv_h2 / norm);
        }
    const auto dim = base_.rows();
    SparseMatrix system(dim, dim);
    system.setFromTriplets(closure.begin(), closure.end());
    SparseMatrix identity(dim, dim);
    identity.setIdentity();
    system += base_ - cdouble(energy) * identity;

    const cdouble incoming = std::polar(1.0, k1 * x1);
    Vector rhs = Vector::Zero(dim);
    const cdouble source = cdouble(0.0, -2.0 * std::sin(k1 * h)) * incoming * inv_h2;
    for (int a = 0; a < rows; ++a)
        rhs[column_[a]] = source * modes_.samples[0][a];

    SparseLU lu;
    try {
        lu.factorize(system);
    } catch (const FactorizationSingular& e) {
        throw SingularSystem("E = " + std::to_string(energy) + " hits a discrete eigenvalue; perturb E");
    }
    ScatteringSolution out;
    out.field = lu.solve(rhs);

    cdouble a1 = 0.0;
    for (int a = 0; a < rows; ++a)
        a1 += modes_.samples[0][a] * out.field[column_[a]];
    a1 /= norm;

    ScatteringPoint& p = out.point;
    p.energy = energy;
    p.k = modes_.continuum_wavenumber(1, energy).real();
    p.reflection = (incoming - a1) * incoming;
    p.unitarity_residual = std::abs(std::abs(p.reflection) - 1.0);
    if (!(p.unitarity_residual <= hard_limit))
        throw UnitarityBreach("| |R| - 1 | = " + std::to_string(p.unitarity_residual) + " at E = " +
                              std::to_string(energy));
    return out;
}

ScatteringPoint solve_scattering(const Grid& grid, double lambda, double energy, int n_modes)
{
    return ScatteringSolver(grid, lambda, n_modes).solve(energy).point;
}

void unwrap_phase(std::vector<ScatteringPoint>& points)
{
    if (points.empty())
        return;
    points[0].theta_unwrapped = std::arg(points[0].reflection);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double step = std::arg(points[i].reflection * std::conj(points[i - 1].reflection));
        points[i].theta_unwrapped = points[i - 1].theta_unwrapped + step;
    }
}

void time_delay(std::vector<ScatteringPoint>& p)
{
    const std::size_t n = p.size();
    if (n < 3)
        throw std::invalid_argument("time_delay needs at least 3 points");
    auto th = [&](std::size_t i) { return p[i].theta_unwrapped; };
    auto e = [&](std::size_t i) { return p[i].energy; };
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = e(i) - e(i - 1), h2 = e(i + 1) - e(i);
        p[i].tau_w = -h2 / (h1 * (h1 + h2)) * th(i - 1) + (h2 - h1) / (h1 * h2) * th(i) +
                     h1 / (h2 * (h1 + h2)) * th(i + 1);
    }
    {
        const double h1 = e(1) - e(0), h2 = e(2) - e(1);
        p[0].tau_w = -(2 * h1 + h2) / (h1 * (h1 + h2)) * th(0) + (h1 + h2) / (h1 * h2) * th(1) -
                     h1 / (h2 * (h1 + h2)) * th(2);
    }
    {
        const double h1 = e(n - 1) - e(n - 2), h2 = e(n - 2) - e(n - 3);
        p[n - 1].tau_w = (2 * h1 + h2) / (h1 * (h1 + h2)) * th(n - 1) - (h1 + h2) / (h1 * h2) * th(n - 2) +
                         h1 / (h2 * (h1 + h2)) * th(n - 3);
    }
}

std::vector<ScatteringPoint> sweep_delay(const std::function<ScatteringPoint(double)>& solve,
                                         std::vector<double> energies, const SweepOptions& options)
{
    std::sort(energies.begin(), energies.end());
    energies.erase(std::unique(energies.begin(), energies.end()), energies.end());

    auto solve_all = [&](const std::vector<double>& es) {
        std::vector<ScatteringPoint> out(es.size());
        parallel_for(es.size(), options.workers, [&](std::size_t i) { out[i] = solve(es[i]); });
        return out;
    };

    std::vector<ScatteringPoint> points = solve_all(energies);
    for (;;) {
        std::vector<double> inserts;
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            const double step = std::abs(std::arg(points[i + 1].reflection * std::conj(points[i].reflection)));
            if (step <= options.max_phase_step)
                continue;
            const double de = points[i + 1].energy - points[i].energy;
            if (0.5 * de < options.min_energy_step)
                throw BranchAmbiguity("phase step " + std::to_string(step) + " unresolved near E = " +
                                      std::to_string(points[i].energy));
            inserts.push_back(points[i].energy + 0.5 * de);
        }
        if (inserts.empty())
            break;
        std::vector<ScatteringPoint> added = solve_all(inserts);
        std::vector<ScatteringPoint> merged;
        merged.reserve(points.size() + added.size());
        std::merge(points.begin(), points.end(), added.begin(), added.end(), std::back_inserter(merged),
                   [](const ScatteringPoint& a, const ScatteringPoint& b) { return a.energy < b.energy; });
        points = std::move(merged);
    }
    unwrap_phase(points);
    if (points.size() >= 3)
        time_delay(points);
    return points;
}

std::vector<ScatteringPoint> sweep_delay(const ScatteringSolver& solver, std::vector<double> energies,
                                         const SweepOptions& options)
{
    return sweep_delay([&](double e) { return solver.solve(e).point; }, std::move(energies), options);
}

std::vector<double> linspace(double lo, double hi, int count)
{
    std::vector<double> out;
    if (count == 1)
        return {lo};
    for (int i = 0; i < count; ++i)
        out.push_back(lo + (hi - lo) * i / (count - 1));
    return out;
}

} // namespace ob
