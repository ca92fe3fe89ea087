#pragma once

#include <Eigen/Dense>

#include "ddc/errors.hpp"
#include "ddc/linalg.hpp"

namespace ddc {

/// min 1/2 x^T H x + g^T x  s.t.  Aeq x = beq,  with H symmetric PSD.
struct EqualityQp {
    Matrix H;
    Vector g;
    Matrix Aeq;
    Vector beq;
};

struct QpSolution {
    Vector x;            // minimum-norm minimizer
    Vector multipliers;  // for the reduced (independent) constraint rows
    double kkt_residual = 0.0;
    double constraint_residual = 0.0;
};

namespace detail {

/// Keeps a maximal independent subset of constraint rows (rank-revealing QR
/// on Aeq^T) and returns the reduced system.
inline void drop_dependent_rows(Matrix& Aeq, Vector& beq, double tol = 1e-10) {
    if (Aeq.rows() == 0) return;
    Eigen::ColPivHouseholderQR<Matrix> qr(Aeq.transpose());
    const auto& R = qr.matrixR();
    const double pivot_max = std::abs(R(0, 0));
    int rank = 0;
    const int kmax = static_cast<int>(std::min(Aeq.rows(), Aeq.cols()));
    for (int k = 0; k < kmax; ++k)
        if (pivot_max > 0.0 && std::abs(R(k, k)) > tol * pivot_max) ++rank;

    const auto perm = qr.colsPermutation().indices();
    Matrix A_red(rank, Aeq.cols());
    Vector b_red(rank);
    for (int k = 0; k < rank; ++k) {
        A_red.row(k) = Aeq.row(perm(k));
        b_red(k) = beq(perm(k));
    }
    Aeq = std::move(A_red);
    beq = std::move(b_red);
}

}  // namespace detail

/// Solves the KKT system
///   [H  Aeq^T] [x]   [-g ]
///   [Aeq   0 ] [l] = [beq]
/// by a minimum-norm least-squares factorization after removal of dependent
/// constraint rows. Inconsistent constraints raise infeasible_error carrying
/// the constraint residual.
inline QpSolution solve_equality_qp(const EqualityQp& qp, double feas_tol = 1e-6) {
    const int n = static_cast<int>(qp.H.rows());
    if (qp.H.cols() != n || qp.g.size() != n)
        throw input_error("solve_equality_qp: H/g dimension mismatch");
    if (qp.Aeq.rows() != qp.beq.size() || (qp.Aeq.rows() > 0 && qp.Aeq.cols() != n))
        throw input_error("solve_equality_qp: Aeq/beq dimension mismatch");

    Matrix Aeq = qp.Aeq;
    Vector beq = qp.beq;
    double constraint_residual = 0.0;
    if (Aeq.rows() > 0) {
        // Feasibility check on the full constraint set before row reduction.
        Vector x_feas = min_norm_lstsq(qp.Aeq, qp.beq);
        constraint_residual = (qp.Aeq * x_feas - qp.beq).norm();
        if (constraint_residual > feas_tol * (1.0 + qp.beq.norm()))
            throw infeasible_error("solve_equality_qp: inconsistent equality constraints",
                                   constraint_residual);
        detail::drop_dependent_rows(Aeq, beq);
    }

    const int c = static_cast<int>(Aeq.rows());
    Matrix K = Matrix::Zero(n + c, n + c);
    K.topLeftCorner(n, n) = qp.H;
    if (c > 0) {
        K.topRightCorner(n, c) = Aeq.transpose();
        K.bottomLeftCorner(c, n) = Aeq;
    }
    Vector rhs(n + c);
    rhs << -qp.g, beq;

    Vector sol = min_norm_lstsq(K, rhs);

    QpSolution out;
    out.x = sol.head(n);
    out.multipliers = sol.tail(c);
    out.kkt_residual = (K * sol - rhs).norm();
    out.constraint_residual = constraint_residual;
    if (out.kkt_residual > feas_tol * (1.0 + rhs.norm()))
        throw infeasible_error("solve_equality_qp: KKT system inconsistent", out.kkt_residual);
    return out;
}

}  // namespace ddc
