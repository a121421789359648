#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ob {

struct Interval {
    double min = 0.0;
    double max = 0.0;

    double length() const { return max - min; }
    bool contains(double x, double tol = 0.0) const { return x >= min - tol && x <= max + tol; }
    bool operator==(const Interval&) const = default;
};

/// Rectangular billiard [0, box_length] x [0, box_height] with a straight
/// waveguide of width guide_width attached to its x = 0 edge. The guide runs
/// from truncation_x to 0 and occupies guide_offset < y < guide_offset + W.
/// A rectangular barrier of height barrier_height sits inside the guide.
struct BilliardGeometry {
    double box_length = 2.0;
    double box_height = 3.14;
    double guide_width = 0.6;
    double guide_offset = 0.0;
    Interval barrier_x{-0.3, 0.0};
    double barrier_height = 1.0;
    double truncation_x = -13.0;
    double scaling_anchor = -2.0;

    /// Reference configuration; the guide is attached 0.5 above the corner.
    static BilliardGeometry paper()
    {
        BilliardGeometry g;
        g.guide_offset = 0.5;
        return g;
    }

    /// Throws DegenerateGeometry if any structural invariant is violated.
    void validate() const;

    /// Stable FNV-1a hash over the bit patterns of every field.
    std::uint64_t hash() const;

    bool operator==(const BilliardGeometry&) const = default;
};

enum class Region : std::uint8_t { Billiard, GuidePlain, GuideBarrier, GuideScaled };

const char* to_string(Region r);

struct Node {
    int i = 0;  // column, counted from the truncation plane
    int j = 0;  // row, counted from y = 0
    double x = 0.0;
    double y = 0.0;
    Region region = Region::Billiard;
};

/// Uniform Cartesian grid over the interior of the billiard and the truncated
/// guide. Dirichlet walls and the truncation plane carry no unknowns.
class Grid {
public:
    Grid() = default;

    double h() const { return h_; }
    const BilliardGeometry& geometry() const { return geometry_; }
    bool has_guide() const { return has_guide_; }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(std::size_t index) const { return nodes_[index]; }

    /// Linear index of node (i, j) or -1 when (i, j) is a wall or outside.
    int index(int i, int j) const;
    /// Index of the node at physical (x, y), if (x, y) sits on an interior node.
    std::optional<int> find(double x, double y) const;

    double x_of(int i) const { return geometry_.truncation_x + i * h_; }
    double y_of(int j) const { return j * h_; }

    /// Column index of x = 0 (the billiard mouth) and of x = box_length.
    int mouth_column() const { return i_mouth_; }
    int far_wall_column() const { return i_far_; }
    /// Guide rows are guide_row_begin() < j < guide_row_end().
    int guide_row_begin() const { return j_guide_lo_; }
    int guide_row_end() const { return j_guide_hi_; }
    int top_wall_row() const { return j_top_; }
    /// Number of intervals across the guide (W / h).
    int guide_intervals() const { return j_guide_hi_ - j_guide_lo_; }

    /// Node indices of the column adjacent to the truncation plane, ordered by row.
    const std::vector<int>& boundary_column() const { return boundary_column_; }

    std::size_t count(Region r) const;

    friend Grid build_grid(const BilliardGeometry&, double, bool);

private:
    double h_ = 0.0;
    BilliardGeometry geometry_{};
    bool has_guide_ = true;
    int i_mouth_ = 0, i_far_ = 0;
    int j_guide_lo_ = 0, j_guide_hi_ = 0, j_top_ = 0;
    std::vector<Node> nodes_;
    std::vector<int> lookup_;  // (i_far_ + 1) x (j_top_ + 1), column-major
    std::vector<int> boundary_column_;
};

/// Closest spacing within 5% of `requested` that places every wall, the
/// guide edges and the barrier edges on grid lines. Throws SnapFailure.
double snap_spacing(const BilliardGeometry& geometry, double requested);

/// Builds the grid. With `with_guide = false` only the closed box is meshed
/// (the guide opening becomes a Dirichlet wall).
Grid build_grid(const BilliardGeometry& geometry, double h, bool with_guide = true);

/// 1 iff the node is a guide node inside the barrier interval; V(x, y) / V0.
int barrier_indicator(const Grid& grid, std::size_t node_index);

} // namespace ob
