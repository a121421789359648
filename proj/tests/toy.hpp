#pragma once

#include "openbilliard/config.hpp"
#include "openbilliard/geometry.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace toy {

// Small open billiard meshed exactly by h = 0.05 and its halvings.
inline ob::BilliardGeometry geometry()
{
    ob::BilliardGeometry g;
    g.box_length = 1.0;
    g.box_height = 1.2;
    g.guide_width = 0.4;
    g.guide_offset = 0.4;
    g.barrier_x = {-0.2, 0.0};
    g.barrier_height = 1.0;
    g.truncation_x = -4.0;
    g.scaling_anchor = -1.5;
    return g;
}

constexpr double h = 0.05;
constexpr double transition = 0.5;

// Run configuration on the toy geometry; every command finishes in seconds.
inline ob::RunConfig run_config(const std::string& output)
{
    ob::RunConfig c;
    c.geometry = geometry();
    c.numerics.h = h;
    c.numerics.n_modes = 4;
    c.numerics.transition_width = transition;
    c.delay.lambdas = {10.0, 5.0};
    c.delay.energy_min = 65.0;
    c.delay.energy_max = 80.0;
    c.delay.count = 12;
    c.poles.lambdas = {10.0};
    c.poles.energy_min = 95.0;
    c.poles.energy_max = 100.0;
    c.poles.scan_min = 88.0;
    c.poles.scan_max = 92.0;
    c.poles.shift_spacing = 4.0;
    c.poles.shift_imag = -0.5;
    c.poles.eig_count = 8;
    c.trace.lambda_from = 10.0;
    c.trace.lambda_to = 5.0;
    c.trace.seeds = {98.8};
    c.trace.initial_step = 2.5;
    c.gamow.lambdas = {10.0, 5.0};
    c.gamow.m_max = 4;
    c.gamow.n_max = 4;
    c.output = output;
    return c;
}

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed0000ULL + salt); }

inline double uniform(std::mt19937_64& r, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(r);
}

inline int uniform_int(std::mt19937_64& r, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(r);
}

} // namespace toy
