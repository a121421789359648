#pragma once

#include "openbilliard/operator.hpp"

#include <cstdint>
#include <vector>

namespace ob {

struct EigenPair {
    cdouble value;
    Vector vector;     // unit 2-norm
    double residual;   // ||A x - value x|| / ||x||
    bool converged;
};

struct EigsOptions {
    std::uint64_t seed = 20011;
    int krylov_dim = 0;         // 0: max(2 count + 10, 30)
    int max_restarts = 300;
    double ritz_tol = 1e-13;    // on the shift-inverted Ritz residual, relative to |mu|
    double residual_tol = 1e-8; // acceptance threshold on the true residual
};

struct EigsResult {
    std::vector<EigenPair> pairs;  // sorted by distance to the shift
    bool all_converged = true;
    int restarts = 0;
    cdouble shift_used;
};

/// The `count` eigenpairs of `a` closest to `shift`, by Krylov-Schur on
/// (A - shift I)^{-1} with a sparse LU. A singular shift is perturbed by
/// 1e-6 (1 + i). Pairs whose residual misses residual_tol are returned with
/// converged = false.
EigsResult eigs_near(const SparseMatrix& a, cdouble shift, int count, const EigsOptions& options = {});

namespace detail {

/// Reorders the complex Schur form T = U^H S U so that diagonal entries appear
/// in order of decreasing modulus. Updates t and u in place.
void sort_schur_by_modulus(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u);

} // namespace detail

} // namespace ob
