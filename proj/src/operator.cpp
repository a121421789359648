#include "openbilliard/operator.hpp"

#include "openbilliard/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

namespace ob {

namespace {

DiscreteOperator assemble(const Grid& grid, double lambda, const ScalingMap* map)
{
    const double h = grid.h();
    const double inv_h2 = 1.0 / (h * h);
    const double barrier = lambda * grid.geometry().barrier_height;
    const auto n = static_cast<Eigen::Index>(grid.size());

    // 1/g'^2 at the half node between columns i and i + 1. Both matrix
    // entries of a coupling read the same value, so A is exactly symmetric.
    auto half = [&](int i) -> cdouble {
        if (!map)
            return 1.0;
        return map->coefficients(grid.x_of(i) + 0.5 * h).inv_gp2;
    };

    std::vector<Eigen::Triplet<cdouble>> triplets;
    triplets.reserve(grid.size() * 5);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const Node& node = grid.node(p);
        const cdouble a_left = half(node.i - 1);
        const cdouble a_right = half(node.i);
        cdouble diag = (a_left + a_right + 2.0) * inv_h2;
        if (node.region == Region::GuideBarrier)
            diag += barrier;
        if (map)
            diag += map->coefficients(node.x).extra_potential;
        const auto row = static_cast<Eigen::Index>(p);
        triplets.emplace_back(row, row, diag);

        if (int q = grid.index(node.i - 1, node.j); q >= 0)
            triplets.emplace_back(row, q, -a_left * inv_h2);
        if (int q = grid.index(node.i + 1, node.j); q >= 0)
            triplets.emplace_back(row, q, -a_right * inv_h2);
        if (int q = grid.index(node.i, node.j - 1); q >= 0)
            triplets.emplace_back(row, q, -inv_h2);
        if (int q = grid.index(node.i, node.j + 1); q >= 0)
            triplets.emplace_back(row, q, -inv_h2);
    }

    DiscreteOperator op;
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix.makeCompressed();
    op.h = h;
    op.lambda = lambda;
    op.theta = map ? map->theta() : cdouble{1.0, 0.0};
    op.geometry_hash = grid.geometry().hash();
    return op;
}

} // namespace

DiscreteOperator assemble_unscaled(const Grid& grid, double lambda) { return assemble(grid, lambda, nullptr); }

DiscreteOperator assemble_scaled(const Grid& grid, double lambda, const ScalingMap& map)
{
    const auto& geo = grid.geometry();
    const double lo = map.anchor() - map.transition_width();
    const double hi = map.anchor();
    if (!grid.has_guide())
        throw LayerPlacement("scaled operator needs the waveguide");
    if (!(lo > geo.truncation_x + grid.h() && hi < geo.barrier_x.min))
        throw LayerPlacement("transition layer must lie strictly inside the plain guide");
    return assemble(grid, lambda, &map);
}

double symmetry_defect(const SparseMatrix& a)
{
    const SparseMatrix diff = SparseMatrix(a.transpose()) - a;
    double defect = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
            defect = std::max(defect, std::abs(it.value()));
    return defect;
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out)
{
    out << "%%MatrixMarket matrix coordinate complex general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    char buf[96];
    for (Eigen::Index k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", static_cast<long>(it.row() + 1),
                          static_cast<long>(it.col() + 1), it.value().real(), it.value().imag());
            out << buf;
        }
}

} // namespace ob
