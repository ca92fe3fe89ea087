#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "ddc/descriptor.hpp"
#include "ddc/errors.hpp"
#include "ddc/linalg.hpp"

namespace ddc {

/// Quasi-Weierstrass decomposition of a regular pencil:
///   S E P = blkdiag(I_q, N),   S A P = blkdiag(A1, I_r),
///   S B   = [B1; B2],          C P   = [C1, C2],
/// with N nilpotent of index s. The pair (A1, B1) is the explicit slow
/// subsystem, (N, B2) the algebraic fast subsystem. D is carried along so the
/// decomposition is a self-contained input-output model.
struct QuasiWeierstrass {
    Matrix P, S;
    Matrix A1, B1, B2, C1, C2, N, D;
    int q = 0;  // slow dimension
    int r = 0;  // fast dimension
    int s = 1;  // nilpotency index of N (convention: 1 when r == 0)

    int n() const { return q + r; }
    int m() const { return static_cast<int>(B1.cols()); }
    int p() const { return static_cast<int>(C1.rows()); }

    /// Frobenius error of the two defining block identities for given (E, A).
    double reconstruction_error(const Matrix& E, const Matrix& A) const {
        Matrix blkE = Matrix::Zero(n(), n());
        blkE.topLeftCorner(q, q).setIdentity();
        blkE.bottomRightCorner(r, r) = N;
        Matrix blkA = Matrix::Zero(n(), n());
        blkA.topLeftCorner(q, q) = A1;
        blkA.bottomRightCorner(r, r).setIdentity();
        return std::max((S * E * P - blkE).norm(), (S * A * P - blkA).norm());
    }
};

namespace detail {

/// Limit of the nested sequence V_{i+1} = M^{-1}(im(K V_i)) starting from V_0.
inline Matrix wong_limit(const Matrix& M, const Matrix& K, Matrix V, double tol) {
    const int n = static_cast<int>(M.rows());
    for (int i = 0; i < n + 1; ++i) {
        Matrix next = preimage(M, K * V, tol);
        if (next.cols() == V.cols()) return next;
        V = next;
    }
    return V;
}

inline int nilpotency_index(const Matrix& N, double tol) {
    const int r = static_cast<int>(N.rows());
    if (r == 0) return 1;
    const double nn = N.norm();
    Matrix power = N;
    for (int s = 1; s <= r; ++s) {
        if (power.norm() <= tol * std::max(1.0, std::pow(nn, s))) return s;
        power = power * N;
    }
    throw numerical_error("quasi_weierstrass: fast block is not numerically nilpotent");
}

}  // namespace detail

/// Quasi-Weierstrass form via Wong sequences:
///   V_{i+1} = A^{-1}(E V_i) from V_0 = R^n,  W_{i+1} = E^{-1}(A W_i) from W_0 = {0};
/// then P = [V, W] and S = [E V, A W]^{-1}.
inline QuasiWeierstrass quasi_weierstrass(const DescriptorSystem& sys,
                                          double tol = kDefaultRankTol,
                                          double tol_qw = 1e-10,
                                          double cond_max = 1e12) {
    sys.validate();
    if (!check_regularity(sys, tol))
        throw domain_error("quasi_weierstrass: pencil (E, A) is not regular");

    const int n = sys.n();
    Matrix V = detail::wong_limit(sys.A, sys.E, Matrix::Identity(n, n), tol);
    Matrix W = detail::wong_limit(sys.E, sys.A, Matrix(n, 0), tol);

    const int q = static_cast<int>(V.cols());
    const int r = static_cast<int>(W.cols());
    if (q + r != n)
        throw numerical_error("quasi_weierstrass: Wong subspace dimensions do not sum to n");

    Matrix T(n, n);
    T << sys.E * V, sys.A * W;
    Eigen::JacobiSVD<Matrix> tsvd(T, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = tsvd.singularValues();
    if (sv(n - 1) <= 0.0 || sv(0) / sv(n - 1) > cond_max)
        throw numerical_error("quasi_weierstrass: [E V, A W] is ill-conditioned");

    QuasiWeierstrass qw;
    qw.q = q;
    qw.r = r;
    qw.P = Matrix(n, n);
    qw.P << V, W;
    qw.S = tsvd.solve(Matrix::Identity(n, n));

    Matrix sep = qw.S * sys.E * qw.P;
    Matrix sap = qw.S * sys.A * qw.P;
    const double block_tol = tol_qw * (1.0 + sys.E.norm() + sys.A.norm());
    if (sep.bottomLeftCorner(r, q).norm() > block_tol ||
        sep.topRightCorner(q, r).norm() > block_tol ||
        sap.bottomLeftCorner(r, q).norm() > block_tol ||
        sap.topRightCorner(q, r).norm() > block_tol ||
        (sep.topLeftCorner(q, q) - Matrix::Identity(q, q)).norm() > block_tol ||
        (sap.bottomRightCorner(r, r) - Matrix::Identity(r, r)).norm() > block_tol)
        throw numerical_error("quasi_weierstrass: block structure not attained");

    qw.A1 = sap.topLeftCorner(q, q);
    qw.N = sep.bottomRightCorner(r, r);
    Matrix sb = qw.S * sys.B;
    qw.B1 = sb.topRows(q);
    qw.B2 = sb.bottomRows(r);
    Matrix cp = sys.C * qw.P;
    qw.C1 = cp.leftCols(q);
    qw.C2 = cp.rightCols(r);
    qw.D = sys.D;
    qw.s = detail::nilpotency_index(qw.N, tol);
    return qw;
}

/// Kalman controllability test on the slow subsystem (A1, B1).
inline bool r_controllable(const QuasiWeierstrass& qw, double tol = kDefaultRankTol) {
    if (qw.q == 0) return true;
    Matrix ctrb(qw.q, qw.q * qw.m());
    Matrix block = qw.B1;
    for (int k = 0; k < qw.q; ++k) {
        ctrb.middleCols(k * qw.m(), qw.m()) = block;
        block = qw.A1 * block;
    }
    return numerical_rank(ctrb, tol) == qw.q;
}

namespace detail {

inline Matrix observability_stack(const QuasiWeierstrass& qw, int depth) {
    Matrix obs(depth * qw.p(), qw.q);
    Matrix block = qw.C1;
    for (int k = 0; k < depth; ++k) {
        obs.middleRows(k * qw.p(), qw.p()) = block;
        block = block * qw.A1;
    }
    return obs;
}

}  // namespace detail

/// Kalman observability test on (C1, A1).
inline bool r_observable(const QuasiWeierstrass& qw, double tol = kDefaultRankTol) {
    if (qw.q == 0) return true;
    return numerical_rank(detail::observability_stack(qw, qw.q), tol) == qw.q;
}

/// Smallest depth at which the observability stack of (C1, A1) reaches rank q.
inline int observability_index(const QuasiWeierstrass& qw, double tol = kDefaultRankTol) {
    if (qw.q == 0) return 0;
    for (int theta = 1; theta <= qw.q; ++theta)
        if (numerical_rank(detail::observability_stack(qw, theta), tol) == qw.q)
            return theta;
    throw domain_error("observability_index: system is not R-observable");
}

/// Consistency test for an initial value x0 = (Ex)(0) given in original
/// coordinates: mapped through S, the fast part must lie in
/// im([N B2, N^2 B2, ..., N^{s-1} B2]).
inline bool is_consistent_initial(const QuasiWeierstrass& qw, const Vector& x0,
                                  double tol = 1e-8) {
    if (x0.size() != qw.n()) throw input_error("is_consistent_initial: x0 size != n");
    if (qw.r == 0) return true;
    Vector v2 = (qw.S * x0).tail(qw.r);
    const double scale = 1.0 + x0.norm();
    if (qw.s == 1) return v2.norm() <= tol * scale;

    Matrix K(qw.r, (qw.s - 1) * qw.m());
    Matrix power = qw.N;
    for (int k = 0; k < qw.s - 1; ++k) {
        K.middleCols(k * qw.m(), qw.m()) = power * qw.B2;
        power = qw.N * power;
    }
    Vector c = min_norm_lstsq(K, v2);
    return (K * c - v2).norm() <= tol * scale;
}

}  // namespace ddc
