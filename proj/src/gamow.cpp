#include "openbilliard/gamow.hpp"

#include "openbilliard/errors.hpp"
#include "openbilliard/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ob {

using std::numbers::pi;

GamowState extract_gamow(const ResonancePole& pole, const Grid& grid)
{
    if (!pole.eigenvector)
        throw std::invalid_argument("pole carries no eigenvector");
    const Vector& vec = *pole.eigenvector;
    if (static_cast<std::size_t>(vec.size()) != grid.size())
        throw std::invalid_argument("eigenvector does not match the grid");

    GamowState state;
    state.pole = pole;
    state.box_length = grid.geometry().box_length;
    state.box_height = grid.geometry().box_height;
    state.h = grid.h();

    std::vector<cdouble> vals;
    double billiard_norm2 = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const Node& node = grid.node(p);
        if (node.region != Region::Billiard)
            continue;
        state.x.push_back(node.x);
        state.y.push_back(node.y);
        vals.push_back(vec[static_cast<Eigen::Index>(p)]);
        billiard_norm2 += std::norm(vals.back());
    }
    if (std::sqrt(billiard_norm2) < 1e-6 * vec.norm())
        throw NullRestriction("eigenvector has no weight inside the billiard");

    state.values = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    const double h2 = state.h * state.h;
    const cdouble cnorm2 = (state.values.array().square().sum()) * h2;
    if (std::abs(cnorm2) < 1e-12 * billiard_norm2 * h2)
        throw NullRestriction("c-norm of the restriction vanishes");
    state.normalization = std::sqrt(cnorm2);
    state.values /= state.normalization;

    Eigen::Index peak = 0;
    state.values.cwiseAbs().maxCoeff(&peak);
    if (state.values[peak].real() < 0)
        state.values = -state.values;
    return state;
}

double box_mode(int m, int n, double lx, double ly, double x, double y)
{
    return 2.0 / std::sqrt(lx * ly) * std::sin(m * pi * x / lx) * std::sin(n * pi * y / ly);
}

std::vector<MixingEntry> mixing_coefficients(const GamowState& state, int m_max, int n_max, double cutoff)
{
    std::vector<MixingEntry> out;
    const double h2 = state.h * state.h;
    for (int m = 1; m <= m_max; ++m)
        for (int n = 1; n <= n_max; ++n) {
            cdouble c = 0.0;
            for (Eigen::Index k = 0; k < state.values.size(); ++k)
                c += state.values[k] * box_mode(m, n, state.box_length, state.box_height,
                                                state.x[static_cast<std::size_t>(k)],
                                                state.y[static_cast<std::size_t>(k)]);
            c *= h2;
            if (std::abs(c) > cutoff)
                out.push_back({m, n, c});
        }
    std::stable_sort(out.begin(), out.end(), [](const MixingEntry& a, const MixingEntry& b) {
        return std::abs(a.coefficient) > std::abs(b.coefficient);
    });
    return out;
}

cdouble c_product(const GamowState& a, const GamowState& b)
{
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("states live on different grids");
    return (a.values.array() * b.values.array()).sum() * a.h * a.h;
}

double billiard_share(const Vector& v, const Grid& grid)
{
    const double x0 = grid.geometry().scaling_anchor;
    double billiard = 0.0, total = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const Node& node = grid.node(p);
        const double w = std::norm(v[static_cast<Eigen::Index>(p)]);
        if (node.x >= x0)
            total += w;
        if (node.region == Region::Billiard)
            billiard += w;
    }
    return total > 0 ? billiard / total : 0.0;
}

Vector back_transform(const Vector& scaled, const Grid& grid, const ScalingMap& map)
{
    Vector out = scaled;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double x = grid.node(p).x;
        if (x < map.anchor())
            out[static_cast<Eigen::Index>(p)] /= std::sqrt(map.gp(x));
    }
    return out;
}

void export_field(const GamowState& state, const std::filesystem::path& path)
{
    if (state.empty())
        throw std::invalid_argument("cannot export an empty Gamow state");
    std::vector<std::size_t> order(state.x.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return state.y[a] < state.y[b] || (state.y[a] == state.y[b] && state.x[a] < state.x[b]);
    });

    std::string text = "# Lx Ly h lambda ReE ImE\n";
    text += format_double(state.box_length) + ' ' + format_double(state.box_height) + ' ' + format_double(state.h) +
            ' ' + format_double(state.pole.lambda) + ' ' + format_double(state.pole.energy.real()) + ' ' +
            format_double(state.pole.energy.imag()) + '\n';
    text += "# x y Re Im abs\n";
    for (std::size_t k : order) {
        const cdouble v = state.values[static_cast<Eigen::Index>(k)];
        text += format_double(state.x[k]) + ' ' + format_double(state.y[k]) + ' ' + format_double(v.real()) + ' ' +
                format_double(v.imag()) + ' ' + format_double(std::abs(v)) + '\n';
    }
    write_atomic(path, text);
}

FieldFile read_field(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    FieldFile f;
    std::string line;
    auto next_data_line = [&]() -> bool {
        while (std::getline(in, line))
            if (!line.empty() && line[0] != '#')
                return true;
        return false;
    };
    if (!next_data_line())
        throw IoError("field file has no header: " + path.string());
    {
        std::istringstream hdr(line);
        double re = 0, im = 0;
        if (!(hdr >> f.box_length >> f.box_height >> f.h >> f.lambda >> re >> im))
            throw IoError("malformed field header: " + path.string());
        f.energy = {re, im};
    }
    while (next_data_line()) {
        std::istringstream row(line);
        double x, y, re, im, mag;
        if (!(row >> x >> y >> re >> im >> mag))
            throw IoError("malformed field row: " + line);
        f.x.push_back(x);
        f.y.push_back(y);
        f.values.emplace_back(re, im);
    }
    return f;
}

void export_mixing(const std::vector<MixingEntry>& mixing, const std::filesystem::path& path)
{
    std::string text = "m,n,ReC,ImC,absC2\n";
    for (const auto& e : mixing)
        text += std::to_string(e.m) + ',' + std::to_string(e.n) + ',' + format_double(e.coefficient.real()) + ',' +
                format_double(e.coefficient.imag()) + ',' + format_double(std::norm(e.coefficient)) + '\n';
    write_atomic(path, text);
}

} // namespace ob
