#include "openbilliard/linear_solver.hpp"

#include "openbilliard/errors.hpp"

#include <Eigen/UmfPackSupport>

namespace ob {

struct SparseLU::Impl {
    SparseMatrix matrix;  // UmfPackLU keeps a reference to the factorized matrix
    Eigen::UmfPackLU<SparseMatrix> lu;
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {}
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

void SparseLU::factorize(const SparseMatrix& a)
{
    impl_->matrix = a;
    impl_->matrix.makeCompressed();
    impl_->lu.compute(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success)
        throw FactorizationSingular("sparse LU failed (singular matrix)");
}

Vector SparseLU::solve(const Vector& rhs) const
{
    Vector x = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success)
        throw FactorizationSingular("sparse triangular solve failed");
    return x;
}

} // namespace ob
