#pragma once

#include <Eigen/Dense>

#include "ddc/errors.hpp"
#include "ddc/trajectory.hpp"

namespace ddc {

inline constexpr double kDefaultRankTol = 1e-9;

/// Numerical rank: number of singular values above tol * sigma_max.
inline int numerical_rank(const Matrix& M, double tol = kDefaultRankTol) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0)) ++rank;
    return rank;
}

/// Orthonormal basis of the column space (empty matrix for the zero space).
inline Matrix orthonormal_range(const Matrix& M, double tol = kDefaultRankTol) {
    if (M.cols() == 0 || M.size() == 0) return Matrix(M.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(0) > 0.0 && sv(i) > tol * sv(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis of the kernel.
inline Matrix kernel_basis(const Matrix& M, double tol = kDefaultRankTol) {
    if (M.rows() == 0) return Matrix::Identity(M.cols(), M.cols());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(0) > 0.0 && sv(i) > tol * sv(0)) ++rank;
    return svd.matrixV().rightCols(M.cols() - rank);
}

/// Basis of the preimage {x | M x in span(range_basis)}; range_basis with zero
/// columns denotes the zero subspace.
inline Matrix preimage(const Matrix& M, const Matrix& range_basis,
                       double tol = kDefaultRankTol) {
    const Matrix Q = orthonormal_range(range_basis, tol);
    // (I - Q Q^T) M x = 0  <=>  M x in span(Q)
    Matrix projected = M - Q * (Q.transpose() * M);
    // Rank decisions are made relative to the scale of M itself: directions the
    // projector annihilates up to roundoff must count as kernel directions even
    // when the projected matrix is numerically zero.
    if (projected.rows() == 0) return Matrix::Identity(M.cols(), M.cols());
    Eigen::JacobiSVD<Matrix> svd(projected, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thresh = tol * M.norm();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return svd.matrixV().rightCols(M.cols() - rank);
}

/// Minimum-norm least-squares solution (deterministic for rank-deficient M).
inline Vector min_norm_lstsq(const Matrix& M, const Vector& rhs) {
    if (M.size() == 0) return Vector::Zero(M.cols());
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
    return cod.solve(rhs);
}

}  // namespace ddc
