#include "openbilliard/geometry.hpp"

#include "openbilliard/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace ob {

namespace {

constexpr double kSnapRelTol = 1e-6;
constexpr double kSnapWindow = 0.05;
constexpr int kMinGuideNodes = 4;

bool divides(double length, double h)
{
    if (length == 0.0)
        return true;
    const double q = std::abs(length) / h;
    return std::abs(q - std::round(q)) * h <= kSnapRelTol * std::abs(length);
}

int steps(double length, double h) { return static_cast<int>(std::lround(length / h)); }

} // namespace

void BilliardGeometry::validate() const
{
    if (!(box_length > 0 && box_height > 0 && guide_width > 0 && barrier_height > 0))
        throw DegenerateGeometry("box_length, box_height, guide_width and barrier_height must be positive");
    if (guide_offset < 0 || guide_offset + guide_width > box_height)
        throw DegenerateGeometry("waveguide opening must lie within the billiard edge");
    if (!(truncation_x < scaling_anchor && scaling_anchor < barrier_x.min && barrier_x.min <= barrier_x.max &&
          barrier_x.max <= 0.0))
        throw DegenerateGeometry("require truncation_x < scaling_anchor < barrier.min <= barrier.max <= 0");
}

std::uint64_t BilliardGeometry::hash() const
{
    const double fields[] = {box_length,    box_height,    guide_width,    guide_offset,  barrier_x.min,
                             barrier_x.max, barrier_height, truncation_x, scaling_anchor};
    std::uint64_t hash = 1469598103934665603ULL;
    for (double f : fields) {
        std::uint64_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            hash ^= (bits >> (8 * b)) & 0xffU;
            hash *= 1099511628211ULL;
        }
    }
    return hash;
}

const char* to_string(Region r)
{
    switch (r) {
    case Region::Billiard: return "BILLIARD";
    case Region::GuidePlain: return "GUIDE_PLAIN";
    case Region::GuideBarrier: return "GUIDE_BARRIER";
    case Region::GuideScaled: return "GUIDE_SCALED";
    }
    return "?";
}

int Grid::index(int i, int j) const
{
    if (i < 0 || j < 0 || i > i_far_ || j > j_top_)
        return -1;
    return lookup_[static_cast<std::size_t>(i) * (j_top_ + 1) + j];
}

std::optional<int> Grid::find(double x, double y) const
{
    const double fi = (x - geometry_.truncation_x) / h_;
    const double fj = y / h_;
    const long i = std::lround(fi), j = std::lround(fj);
    if (std::abs(fi - i) > 1e-6 || std::abs(fj - j) > 1e-6)
        return std::nullopt;
    const int idx = index(static_cast<int>(i), static_cast<int>(j));
    if (idx < 0)
        return std::nullopt;
    return idx;
}

std::size_t Grid::count(Region r) const
{
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [r](const Node& n) { return n.region == r; }));
}

double snap_spacing(const BilliardGeometry& g, double requested)
{
    if (!(requested > 0))
        throw SnapFailure("grid spacing must be positive");
    const double lengths[] = {g.box_length,    g.box_height,    g.guide_width,  g.guide_offset,
                              g.barrier_x.min, g.barrier_x.max, g.truncation_x};

    // Every admissible spacing divides the guide width, so it is W / n.
    const int n_lo = std::max(1, static_cast<int>(std::ceil(g.guide_width / (requested * (1 + kSnapWindow)))));
    const int n_hi = static_cast<int>(std::floor(g.guide_width / (requested * (1 - kSnapWindow))));
    double best = 0.0;
    double best_dev = std::numeric_limits<double>::infinity();
    for (int n = n_lo; n <= n_hi; ++n) {
        const double h = g.guide_width / n;
        if (!std::all_of(std::begin(lengths), std::end(lengths), [h](double L) { return divides(L, h); }))
            continue;
        const double dev = std::abs(h - requested);
        if (dev < best_dev) {
            best = h;
            best_dev = dev;
        }
    }
    if (best == 0.0)
        throw SnapFailure("no spacing within 5% of " + std::to_string(requested) + " aligns all geometric edges");
    return best;
}

Grid build_grid(const BilliardGeometry& geometry, double requested_h, bool with_guide)
{
    geometry.validate();
    const double h = snap_spacing(geometry, requested_h);

    Grid grid;
    grid.h_ = h;
    grid.geometry_ = geometry;
    grid.has_guide_ = with_guide;
    grid.i_mouth_ = steps(-geometry.truncation_x, h);
    grid.i_far_ = grid.i_mouth_ + steps(geometry.box_length, h);
    grid.j_guide_lo_ = steps(geometry.guide_offset, h);
    grid.j_guide_hi_ = grid.j_guide_lo_ + steps(geometry.guide_width, h);
    grid.j_top_ = steps(geometry.box_height, h);

    if (grid.guide_intervals() - 1 < kMinGuideNodes)
        throw DegenerateGeometry("fewer than 4 interior nodes across the guide width");

    const int n_rows = grid.j_top_ + 1;
    grid.lookup_.assign(static_cast<std::size_t>(grid.i_far_ + 1) * n_rows, -1);

    const double tol = 1e-9 * h;
    auto add = [&](int i, int j, Region region) {
        Node node{i, j, grid.x_of(i), grid.y_of(j), region};
        grid.lookup_[static_cast<std::size_t>(i) * n_rows + j] = static_cast<int>(grid.nodes_.size());
        grid.nodes_.push_back(node);
    };

    // Column-major: all rows of column i before column i + 1.
    if (with_guide) {
        for (int i = 1; i <= grid.i_mouth_; ++i) {
            const double x = grid.x_of(i);
            Region region = Region::GuidePlain;
            if (geometry.barrier_x.contains(x, tol))
                region = Region::GuideBarrier;
            else if (x < geometry.scaling_anchor - tol)
                region = Region::GuideScaled;
            for (int j = grid.j_guide_lo_ + 1; j < grid.j_guide_hi_; ++j)
                add(i, j, region);
        }
        for (int j = grid.j_guide_lo_ + 1; j < grid.j_guide_hi_; ++j)
            grid.boundary_column_.push_back(grid.index(1, j));
    }
    for (int i = grid.i_mouth_ + 1; i < grid.i_far_; ++i)
        for (int j = 1; j < grid.j_top_; ++j)
            add(i, j, Region::Billiard);

    return grid;
}

int barrier_indicator(const Grid& grid, std::size_t node_index)
{
    return grid.node(node_index).region == Region::GuideBarrier ? 1 : 0;
}

} // namespace ob
