#pragma once

#include "openbilliard/geometry.hpp"
#include "openbilliard/poles.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ob {

struct MixingEntry {
    int m = 0;
    int n = 0;
    cdouble coefficient;
};

/// Resonance wavefunction on the billiard interior, c-normalized:
/// sum_nodes psi^2 h^2 = 1 (no conjugation).
struct GamowState {
    ResonancePole pole;
    double box_length = 0.0;
    double box_height = 0.0;
    double h = 0.0;
    std::vector<double> x;  // billiard-local coordinates, x = 0 at the mouth wall
    std::vector<double> y;
    Vector values;
    cdouble normalization;  // c-norm of the raw restriction
    std::vector<MixingEntry> mixing;

    bool empty() const { return values.size() == 0; }
};

/// Restricts the pole's eigenvector to billiard nodes (where g is the
/// identity, so no back-transformation applies), c-normalizes it and fixes
/// the sign so the largest-modulus node has positive real part.
/// Throws NullRestriction when the billiard carries (almost) no amplitude.
GamowState extract_gamow(const ResonancePole& pole, const Grid& grid);

/// Normalized closed-box mode (2 / sqrt(Lx Ly)) sin(m pi x / Lx) sin(n pi y / Ly).
double box_mode(int m, int n, double box_length, double box_height, double x, double y);

/// c-projections onto box modes m <= m_max, n <= n_max with |c| > cutoff,
/// sorted by decreasing |c|.
std::vector<MixingEntry> mixing_coefficients(const GamowState& state, int m_max = 8, int n_max = 10,
                                             double cutoff = 1e-3);

/// sum_nodes psi_a psi_b h^2 over the common billiard nodes.
cdouble c_product(const GamowState& a, const GamowState& b);

/// Hermitian weight of the eigenvector on the billiard relative to the
/// unscaled part of the domain (x >= x0).
double billiard_share(const Vector& eigenvector, const Grid& grid);

/// Physical wavefunction psi(x) = psi~(x) / sqrt(g'(x)) on every node.
Vector back_transform(const Vector& scaled, const Grid& grid, const ScalingMap& map);

/// Text grid file: header line with Lx Ly h lambda ReE ImE, then
/// "x y Re Im |psi|" rows in y-major order at 17 significant digits.
/// Written atomically. Throws std::invalid_argument for an empty state and
/// IoError on write failure.
void export_field(const GamowState& state, const std::filesystem::path& path);

struct FieldFile {
    double box_length = 0.0, box_height = 0.0, h = 0.0, lambda = 0.0;
    cdouble energy;
    std::vector<double> x, y;
    std::vector<cdouble> values;
};

FieldFile read_field(const std::filesystem::path& path);

/// CSV with columns m,n,ReC,ImC,absC2.
void export_mixing(const std::vector<MixingEntry>& mixing, const std::filesystem::path& path);

} // namespace ob
