#include "openbilliard/eigs.hpp"

#include "openbilliard/errors.hpp"
#include "openbilliard/linear_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ob {

namespace detail {

namespace {

// Swap diagonal entries k, k+1 of upper-triangular t with a unitary rotation.
void swap_adjacent(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u, Eigen::Index k)
{
    const cdouble a = t(k, k), b = t(k + 1, k + 1), c = t(k, k + 1);
    cdouble x0 = c, x1 = b - a;
    const double nrm = std::hypot(std::abs(x0), std::abs(x1));
    if (nrm == 0.0)
        return;
    x0 /= nrm;
    x1 /= nrm;
    // G = [[x0, -conj(x1)], [x1, conj(x0)]]; its first column is the
    // eigenvector of the 2x2 block for b.
    Eigen::Matrix2cd g;
    g << x0, -std::conj(x1), x1, std::conj(x0);
    const Eigen::Index m = t.rows();
    t.middleRows(k, 2) = g.adjoint() * t.middleRows(k, 2);
    t.middleCols(k, 2) = t.middleCols(k, 2) * g;
    u.middleCols(k, 2) = u.middleCols(k, 2) * g;
    t(k + 1, k) = 0.0;
    t(k, k) = b;
    t(k + 1, k + 1) = a;
    (void)m;
}

} // namespace

void sort_schur_by_modulus(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u)
{
    const Eigen::Index m = t.rows();
    // bubble sort keeps every swap adjacent
    for (Eigen::Index pass = 0; pass < m; ++pass) {
        bool swapped = false;
        for (Eigen::Index k = 0; k + 1 < m - pass; ++k) {
            if (std::abs(t(k + 1, k + 1)) > std::abs(t(k, k))) {
                swap_adjacent(t, u, k);
                swapped = true;
            }
        }
        if (!swapped)
            break;
    }
}

} // namespace detail

namespace {

Vector random_vector(Eigen::Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = cdouble(normal(rng), normal(rng));
    return v / v.norm();
}

// Two passes of classical Gram-Schmidt against the first `k` columns of v.
Eigen::VectorXcd orthogonalize(const Eigen::MatrixXcd& v, Eigen::Index k, Vector& w)
{
    Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(k);
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXcd c = v.leftCols(k).adjoint() * w;
        w.noalias() -= v.leftCols(k) * c;
        coeffs += c;
    }
    return coeffs;
}

// Eigenvector of the leading (i+1)x(i+1) block of upper-triangular t for t(i, i).
Eigen::VectorXcd triangular_eigenvector(const Eigen::MatrixXcd& t, Eigen::Index i)
{
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(i + 1);
    y[i] = 1.0;
    const cdouble lam = t(i, i);
    const double small = 1e-14 * std::max(1.0, std::abs(lam));
    for (Eigen::Index r = i - 1; r >= 0; --r) {
        cdouble s = 0.0;
        for (Eigen::Index c = r + 1; c <= i; ++c)
            s += t(r, c) * y[c];
        cdouble denom = t(r, r) - lam;
        if (std::abs(denom) < small)
            denom = small;
        y[r] = -s / denom;
    }
    return y / y.norm();
}

double true_residual(const SparseMatrix& a, const Vector& x, cdouble value)
{
    return (a * x - value * x).norm() / x.norm();
}

} // namespace

EigsResult eigs_near(const SparseMatrix& a, cdouble shift, int count, const EigsOptions& options)
{
    const Eigen::Index n = a.rows();
    count = static_cast<int>(std::min<Eigen::Index>(count, n));
    EigsResult result;
    if (count <= 0)
        return result;

    SparseMatrix identity(n, n);
    identity.setIdentity();
    SparseLU lu;
    cdouble sigma = shift;
    for (int attempt = 0;; ++attempt) {
        try {
            lu.factorize(a - sigma * identity);
            break;
        } catch (const FactorizationSingular&) {
            if (attempt >= 3)
                throw;
            sigma += 1e-6 * cdouble(1.0, 1.0) * std::max(1.0, std::abs(shift));
        }
    }
    result.shift_used = sigma;

    const Eigen::Index m = std::min<Eigen::Index>(
        n, options.krylov_dim > 0 ? options.krylov_dim : std::max(2 * count + 10, 30));
    const Eigen::Index keep = std::min<Eigen::Index>(m - 1, count + (m - count) / 2);

    std::mt19937_64 rng(options.seed);
    Eigen::MatrixXcd v(n, m + 1);
    Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m + 1, m);
    v.col(0) = random_vector(n, rng);

    Eigen::MatrixXcd t, u;
    Eigen::VectorXcd b;
    Eigen::Index k = 0;
    for (int restart = 0;; ++restart) {
        result.restarts = restart;
        for (Eigen::Index j = k; j < m; ++j) {
            Vector w = lu.solve(v.col(j));
            const Eigen::VectorXcd coeffs = orthogonalize(v, j + 1, w);
            hess.col(j).head(j + 1) += coeffs;
            double beta = w.norm();
            if (beta < 1e-12 * coeffs.norm()) {
                // invariant subspace: continue from a fresh orthogonal direction
                w = random_vector(n, rng);
                orthogonalize(v, j + 1, w);
                beta = 0.0;
                w /= w.norm();
                hess(j + 1, j) = 0.0;
                v.col(j + 1) = w;
            } else {
                hess(j + 1, j) = beta;
                v.col(j + 1) = w / beta;
            }
        }

        Eigen::ComplexSchur<Eigen::MatrixXcd> schur(hess.topRows(m));
        t = schur.matrixT();
        u = schur.matrixU();
        detail::sort_schur_by_modulus(t, u);
        b = hess(m, m - 1) * u.row(m - 1).transpose();

        int converged = 0;
        for (Eigen::Index i = 0; i < count; ++i) {
            const Eigen::VectorXcd y = triangular_eigenvector(t, i);
            const double res = std::abs(b.head(i + 1).dot(y.conjugate()));
            if (res <= options.ritz_tol * std::abs(t(i, i)))
                ++converged;
        }
        if (converged == count || restart >= options.max_restarts)
            break;

        // Krylov-Schur restart: keep the leading `keep` Schur vectors.
        const Eigen::MatrixXcd kept = v.leftCols(m) * u.leftCols(keep);
        v.leftCols(keep) = kept;
        v.col(keep) = v.col(m);
        hess.setZero();
        hess.topLeftCorner(keep, keep) = t.topLeftCorner(keep, keep);
        hess.row(keep).head(keep) = b.head(keep).transpose();
        k = keep;
    }

    for (Eigen::Index i = 0; i < count; ++i) {
        const Eigen::VectorXcd y = triangular_eigenvector(t, i);
        Vector x = v.leftCols(m) * (u.leftCols(i + 1) * y);
        x /= x.norm();
        const cdouble mu = t(i, i);
        EigenPair pair{sigma + 1.0 / mu, x, 0.0, false};
        pair.residual = true_residual(a, pair.vector, pair.value);
        // Polish with inverse iteration on the existing factorization.
        for (int polish = 0; polish < 3 && pair.residual > options.residual_tol; ++polish) {
            Vector z = lu.solve(pair.vector);
            z /= z.norm();
            const Vector az = a * z;
            const cdouble zz = z.transpose() * z;
            const cdouble value = std::abs(zz) > 1e-3 ? cdouble((z.transpose() * az)(0) / zz) : cdouble(z.dot(az));
            const double res = true_residual(a, z, value);
            if (res >= pair.residual)
                break;
            pair = {value, z, res, false};
        }
        pair.converged = pair.residual <= options.residual_tol;
        result.all_converged = result.all_converged && pair.converged;
        result.pairs.push_back(std::move(pair));
    }
    std::stable_sort(result.pairs.begin(), result.pairs.end(), [&](const EigenPair& p, const EigenPair& q) {
        return std::abs(p.value - shift) < std::abs(q.value - shift);
    });
    return result;
}

} // namespace ob
