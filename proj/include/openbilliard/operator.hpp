#pragma once

#include "openbilliard/geometry.hpp"
#include "openbilliard/scaling.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace ob {

using SparseMatrix = Eigen::SparseMatrix<cdouble>;
using Vector = Eigen::VectorXcd;

struct DiscreteOperator {
    SparseMatrix matrix;
    double h = 0.0;
    double lambda = 0.0;
    cdouble theta{1.0, 0.0};
    std::uint64_t geometry_hash = 0;

    Eigen::Index dimension() const { return matrix.rows(); }
};

/// -L_h + lambda V0 chi_barrier with the 5-point Laplacian and Dirichlet walls.
DiscreteOperator assemble_unscaled(const Grid& grid, double lambda);

/// Exterior-complex-scaled operator: flux-form x-derivative with 1/g'^2 at
/// half nodes plus the extra potential on the diagonal. Throws LayerPlacement
/// unless [x0 - d, x0] lies strictly inside the plain guide.
DiscreteOperator assemble_scaled(const Grid& grid, double lambda, const ScalingMap& map);

/// Max-norm of A - A^T.
double symmetry_defect(const SparseMatrix& a);

/// MatrixMarket coordinate complex general dump.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);

} // namespace ob
