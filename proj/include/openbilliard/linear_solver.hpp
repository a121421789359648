#pragma once

#include "openbilliard/operator.hpp"

#include <memory>

namespace ob {

/// Sparse direct LU factorization of a complex matrix (UMFPACK backend).
class SparseLU {
public:
    SparseLU();
    ~SparseLU();
    SparseLU(SparseLU&&) noexcept;
    SparseLU& operator=(SparseLU&&) noexcept;

    /// Throws FactorizationSingular when the matrix is numerically singular.
    void factorize(const SparseMatrix& a);
    Vector solve(const Vector& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace ob
