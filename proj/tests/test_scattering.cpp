#include "doctest.h"
#include "toy.hpp"

#include "openbilliard/eigs.hpp"
#include "openbilliard/errors.hpp"
#include "openbilliard/poles.hpp"
#include "openbilliard/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace ob;
using std::numbers::pi;

namespace {

const Grid& reference_grid()
{
    static const Grid grid = build_grid(BilliardGeometry::paper(), 0.02);
    return grid;
}

// Unit-modulus reflection with a single Breit-Wigner pole on a linear
// background phase.
ScatteringPoint breit_wigner(double e, double e0, double gamma, double background)
{
    ScatteringPoint p;
    p.energy = e;
    const double phase = 2.0 * std::atan2(0.5 * gamma, e0 - e) + background * e;
    p.reflection = std::polar(1.0, phase);
    return p;
}

std::vector<ScatteringPoint> from_phase(const std::vector<double>& es, auto phase)
{
    std::vector<ScatteringPoint> out;
    for (double e : es) {
        ScatteringPoint p;
        p.energy = e;
        p.reflection = std::polar(1.0, phase(e));
        out.push_back(p);
    }
    return out;
}

} // namespace

TEST_SUITE("scattering")
{
    TEST_CASE("transversal thresholds")
    {
        const ModeBasis m = mode_basis(0.6, 0.02, 2);
        CHECK(m.threshold[0] == doctest::Approx(27.4156).epsilon(1e-5));
        CHECK(m.threshold[1] == doctest::Approx(109.662).epsilon(1e-5));
        CHECK(m.rows == 29);
        for (int n = 1; n <= 2; ++n) {
            const double mu = 2.0 / (0.02 * 0.02) * (1 - std::cos(n * pi * 0.02 / 0.6));
            CHECK(m.lattice_threshold[static_cast<std::size_t>(n - 1)] == doctest::Approx(mu).epsilon(1e-14));
            CHECK(m.lattice_threshold[static_cast<std::size_t>(n - 1)] < m.threshold[static_cast<std::size_t>(n - 1)]);
        }
        CHECK_THROWS_AS(mode_basis(0.6, 0.02, 0), std::invalid_argument);
        CHECK_THROWS_AS(mode_basis(0.6, 0.02, 30), std::invalid_argument);
        CHECK_NOTHROW(mode_basis(0.6, 0.02, 29));
    }

    TEST_CASE("lattice wavenumbers satisfy the discrete dispersion relation")
    {
        const double h = 0.02;
        const ModeBasis m = mode_basis(0.6, h, 3);
        for (double e : {30.0, 38.6, 60.0, 100.0}) {
            const cdouble k1 = m.lattice_wavenumber(1, e);
            CHECK(k1.imag() == 0.0);
            CHECK(std::cos(k1.real() * h) == doctest::Approx(1 + 0.5 * h * h * (m.lattice_threshold[0] - e)));
            const cdouble k2 = m.lattice_wavenumber(2, e);
            CHECK(k2.real() == 0.0);
            CHECK(std::cosh(k2.imag() * h) == doctest::Approx(1 + 0.5 * h * h * (m.lattice_threshold[1] - e)));
            CHECK(m.continuum_wavenumber(1, e).real() == doctest::Approx(std::sqrt(e - m.threshold[0])));
            CHECK(m.continuum_wavenumber(2, e).real() == 0.0);
        }
        CHECK_THROWS_AS(m.lattice_wavenumber(1, 1e5), std::domain_error);
    }

    TEST_CASE("sampled modes are orthogonal on every grid")
    {
        for (double h : {0.02, 0.01, 0.005}) {
            const ModeBasis m = mode_basis(0.6, h, 3);
            CHECK(std::abs(m.inner(1, 2)) <= 1e-12);
            CHECK(std::abs(m.inner(1, 3)) <= 1e-12);
            CHECK(m.inner(1, 1) == doctest::Approx(0.3).epsilon(1e-12));
        }
    }

    TEST_CASE("near-impenetrable barrier reflects like a hard wall at x = -0.3")
    {
        const ScatteringSolver solver(reference_grid(), 1e4);
        for (double e : {30.0, 34.0, 38.6}) {
            const ScatteringPoint p = solver.solve(e).point;
            const double k = std::sqrt(e - pow(pi / 0.6, 2));
            const cdouble expected = std::polar(1.0, -0.6 * k);
            const double phase_error = std::abs(std::arg(p.reflection * std::conj(expected)));
            CAPTURE(e);
            CHECK(phase_error <= 0.02 * 0.6 * k);
            CHECK(p.k == doctest::Approx(k));
            CHECK(p.unitarity_residual <= 1e-3);
        }
    }

    TEST_CASE("reflection stays unitary for random couplings and energies")
    {
        const Grid grid = build_grid(toy::geometry(), toy::h);
        auto r = toy::rng(6);
        for (int trial = 0; trial < 12; ++trial) {
            const double lambda = toy::uniform(r, 0.0, 80.0);
            const ScatteringSolver solver(grid, lambda, 6);
            const double lo = solver.modes().lattice_threshold[0], hi = solver.modes().lattice_threshold[1];
            const double e = toy::uniform(r, lo + 0.5, hi - 0.5);
            const ScatteringPoint p = solver.solve(e).point;
            CAPTURE(lambda);
            CAPTURE(e);
            CHECK(p.unitarity_residual <= 1e-3);
        }
    }

    TEST_CASE("eight retained modes are enough")
    {
        const ScatteringSolver eight(reference_grid(), 44.0, 8), sixteen(reference_grid(), 44.0, 16);
        for (double e : {38.5, 39.5}) {
            const cdouble a = eight.solve(e).point.reflection, b = sixteen.solve(e).point.reflection;
            CHECK(std::abs(a - b) < 1e-4);
        }
    }

    TEST_CASE("moving the truncation plane leaves R unchanged")
    {
        BilliardGeometry near = BilliardGeometry::paper();
        near.truncation_x = -9.0;
        const Grid short_grid = build_grid(near, 0.02);
        const ScatteringSolver full(reference_grid(), 44.0), cut(short_grid, 44.0);
        for (double e : {28.5, 35.0, 39.5}) {
            CAPTURE(e);
            CHECK(std::abs(full.solve(e).point.reflection - cut.solve(e).point.reflection) < 1e-6);
        }
    }

    TEST_CASE("solver errors")
    {
        const ScatteringSolver solver(reference_grid(), 44.0);
        CHECK_FALSE(solver.in_window(20.0));
        CHECK_FALSE(solver.in_window(120.0));
        CHECK(solver.in_window(38.0));
        CHECK_THROWS_AS(solver.solve(20.0), std::domain_error);
        CHECK_THROWS_AS(solver.solve(38.0, -1.0), UnitarityBreach);
        const Grid closed = build_grid(BilliardGeometry::paper(), 0.02, false);
        CHECK_THROWS_AS(ScatteringSolver(closed, 1.0), std::invalid_argument);
    }

    TEST_CASE("an isolated resonance winds the phase once")
    {
        const Grid& grid = reference_grid();
        const double lambda = 0.0;
        const auto op = assemble_scaled(grid, lambda, make_rotation_map(0.3, -2.0, 1.0));
        const auto pole = eigs_near(op.matrix, 38.224, 1).pairs.at(0).value;
        const double e0 = pole.real(), gamma = -2.0 * pole.imag();
        REQUIRE(gamma > 0.0);
        REQUIRE(gamma < 0.02);

        const double lo = e0 - 0.1, hi = e0 + 0.1;
        const auto points = sweep_delay(ScatteringSolver(grid, lambda), linspace(lo, hi, 41));
        const double winding = points.back().theta_unwrapped - points.front().theta_unwrapped;
        const double single = 2.0 * (std::atan((hi - e0) / (0.5 * gamma)) - std::atan((lo - e0) / (0.5 * gamma)));
        CHECK(std::abs(winding - single) < 0.3);
        CHECK(std::lround(winding / (2 * pi)) == 1);
    }

    TEST_CASE("phase winding over the window counts the poles")
    {
        const Grid& grid = reference_grid();
        const double lo = 38.0, hi = 40.0;
        const auto points = sweep_delay(ScatteringSolver(grid, 44.0), linspace(lo, hi, 200));
        const double winding = points.back().theta_unwrapped - points.front().theta_unwrapped;

        // Oracle: one Breit-Wigner term per pole near the window plus the
        // hard-wall background of the barrier front face.
        std::vector<cdouble> shifts;
        for (double e = 35.0; e <= 43.0; e += 2.0)
            shifts.emplace_back(e, -0.2);
        const auto poles = find_poles(grid, 44.0, make_rotation_map(0.3, -2.0, 1.0), make_rotation_map(0.4, -2.0, 1.0),
                                      shifts);
        double predicted = -0.6 * (std::sqrt(hi - pow(pi / 0.6, 2)) - std::sqrt(lo - pow(pi / 0.6, 2)));
        int inside = 0;
        for (const auto& p : poles) {
            if (p.classification != Classification::Pole)
                continue;
            const double er = p.energy.real(), half = 0.5 * p.gamma();
            predicted += 2.0 * (std::atan((hi - er) / half) - std::atan((lo - er) / half));
            inside += er >= lo && er <= hi;
        }
        REQUIRE(inside == 3);
        CHECK(std::lround(winding / (2 * pi)) == inside);
        CHECK(std::abs(winding - predicted) <= 0.01 * 2 * pi * inside);
    }

    TEST_CASE("constant reflection gives zero delay")
    {
        auto pts = from_phase(linspace(38, 40, 11), [](double) { return 1.234; });
        unwrap_phase(pts);
        time_delay(pts);
        for (const auto& p : pts) {
            CHECK(p.theta_unwrapped == doctest::Approx(1.234));
            CHECK(p.tau_w == doctest::Approx(0.0));
        }
    }

    TEST_CASE("linear phase on a non-uniform mesh is differentiated exactly")
    {
        auto r = toy::rng(7);
        std::vector<double> es{0.0};
        for (int k = 0; k < 30; ++k)
            es.push_back(es.back() + toy::uniform(r, 0.01, 0.2));
        auto pts = from_phase(es, [](double e) { return 0.7 * e - 0.2; });
        unwrap_phase(pts);
        time_delay(pts);
        for (const auto& p : pts)
            CHECK(p.tau_w == doctest::Approx(0.7).epsilon(1e-9));
    }

    TEST_CASE("hard-wall phase gives the analytic delay")
    {
        const double mu = std::pow(pi / 0.6, 2);
        auto pts = from_phase(linspace(30, 40, 4001), [&](double e) { return -0.6 * std::sqrt(e - mu); });
        unwrap_phase(pts);
        time_delay(pts);
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            const double k = std::sqrt(pts[i].energy - mu);
            CHECK(std::abs(pts[i].tau_w - (-0.3 / k)) <= 1e-4 * 0.3 / k);
            CHECK(std::abs(pts[i].theta_unwrapped - (-0.6 * k)) < 1e-9);
        }
    }

    TEST_CASE("Breit-Wigner delay peaks at the pole with FWHM equal to the width")
    {
        const double e0 = 39.0, gamma = 0.05;
        auto pts = sweep_delay([&](double e) { return breit_wigner(e, e0, gamma, 0.0); }, linspace(38.8, 39.2, 4001));
        const auto peak = std::max_element(pts.begin(), pts.end(),
                                           [](const auto& a, const auto& b) { return a.tau_w < b.tau_w; });
        CHECK(peak->energy == doctest::Approx(e0).epsilon(1e-6));
        CHECK(peak->tau_w == doctest::Approx(4.0 / gamma).epsilon(1e-4));
        double left = 0, right = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double half = 0.5 * peak->tau_w;
            if ((pts[i - 1].tau_w - half) * (pts[i].tau_w - half) <= 0) {
                const double e = pts[i - 1].energy + (half - pts[i - 1].tau_w) / (pts[i].tau_w - pts[i - 1].tau_w) *
                                                         (pts[i].energy - pts[i - 1].energy);
                (e < e0 ? left : right) = e;
            }
        }
        CHECK(right - left == doctest::Approx(gamma).epsilon(1e-3));
        CHECK(pts.back().theta_unwrapped - pts.front().theta_unwrapped ==
              doctest::Approx(2.0 * (std::atan(0.2 / 0.025) + std::atan(0.2 / 0.025))).epsilon(1e-9));
    }

    TEST_CASE("bisection resolves a pole sitting next to a mesh point")
    {
        const double e0 = 38.50001, gamma = 1e-4;
        SweepOptions opts;
        auto pts = sweep_delay([&](double e) { return breit_wigner(e, e0, gamma, -0.1); }, linspace(38, 39, 11), opts);
        CHECK(pts.size() > 11);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].energy > pts[i - 1].energy);
            CHECK(std::abs(pts[i].theta_unwrapped - pts[i - 1].theta_unwrapped) <= opts.max_phase_step + 1e-12);
        }
        const double total = pts.back().theta_unwrapped - pts.front().theta_unwrapped;
        CHECK(total == doctest::Approx(2 * pi - 0.1).epsilon(1e-4));
    }

    TEST_CASE("an unresolvable phase jump is reported")
    {
        auto flip = [](double e) {
            ScatteringPoint p;
            p.energy = e;
            p.reflection = e < 0.5 ? 1.0 : -1.0;
            return p;
        };
        CHECK_THROWS_AS(sweep_delay(flip, linspace(0, 1, 5)), BranchAmbiguity);
    }

    TEST_CASE("sweeps do not depend on the worker count")
    {
        const Grid grid = build_grid(toy::geometry(), toy::h);
        const ScatteringSolver solver(grid, 10.0, 6);
        SweepOptions one, three;
        three.workers = 3;
        const auto es = linspace(65, 80, 12);
        const auto a = sweep_delay(solver, es, one), b = sweep_delay(solver, es, three);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].reflection == b[i].reflection);
            CHECK(a[i].tau_w == b[i].tau_w);
        }
    }

    TEST_CASE("mesh helpers")
    {
        CHECK_THROWS_AS(
            [] {
                std::vector<ScatteringPoint> two(2);
                time_delay(two);
            }(),
            std::invalid_argument);
        const auto m = linspace(38, 40, 200);
        CHECK(m.size() == 200);
        CHECK(m.front() == 38.0);
        CHECK(m.back() == 40.0);
        CHECK(linspace(1, 2, 1) == std::vector<double>{1.0});
    }
}
