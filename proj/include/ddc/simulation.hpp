#pragma once

#include <Eigen/Dense>

#include "ddc/errors.hpp"
#include "ddc/quasi_weierstrass.hpp"
#include "ddc/trajectory.hpp"

namespace ddc {

/// Explicit solution of the quasi-Weierstrass system:
///   z1(t+1) = A1 z1(t) + B1 u(t),
///   z2(t)   = -sum_{k=0}^{s-1} N^k B2 u(t+k),
///   y(t)    = C1 z1(t) + C2 z2(t) + D u(t),   x = P z.
/// z2 is non-causal: producing states on [t0, t0+T-1] needs inputs on
/// [t0, t0+T+s-2]. The returned trajectory carries the trimmed input.
inline Trajectory simulate(const QuasiWeierstrass& qw, const Vector& z1_0,
                           const Matrix& u, int t0 = 0) {
    if (z1_0.size() != qw.q) throw input_error("simulate: z1_0 size != q");
    if (u.rows() != qw.m()) throw input_error("simulate: input dimension != m");
    const int horizon = static_cast<int>(u.cols()) - (qw.s - 1);
    if (horizon < 1)
        throw input_error("simulate: need at least s inputs (s-1 trailing extras)");

    Matrix z1(qw.q, horizon);
    if (qw.q > 0) {
        z1.col(0) = z1_0;
        for (int t = 0; t + 1 < horizon; ++t)
            z1.col(t + 1) = qw.A1 * z1.col(t) + qw.B1 * u.col(t);
    }

    Matrix z2 = Matrix::Zero(qw.r, horizon);
    if (qw.r > 0) {
        Matrix power = Matrix::Identity(qw.r, qw.r);
        for (int k = 0; k < qw.s; ++k) {
            for (int t = 0; t < horizon; ++t) z2.col(t) -= power * (qw.B2 * u.col(t + k));
            power = qw.N * power;
        }
    }

    Matrix z(qw.n(), horizon);
    z << z1, z2;

    Trajectory traj;
    traj.t0 = t0;
    traj.u = u.leftCols(horizon);
    traj.x = qw.P * z;
    traj.y = qw.C1 * z1 + qw.C2 * z2 + qw.D * traj.u;
    return traj;
}

/// State recovered from an input-output window, with the least-squares
/// residual of the defining equations.
struct StateReconstruction {
    Matrix x;  // n x depth, states on [t0, t0 + depth - 1]
    int t0 = 0;
    double residual = 0.0;
};

/// Recovers the unique state behind a manifest window of length theta+s-1
/// (theta = q by default, or the observability index in relaxed mode).
/// The outputs determine z1(t) through the observability stack of (C1, A1);
/// z2 follows from the inputs alone. A large residual means the window is not
/// a trajectory of the system.
inline StateReconstruction reconstruct_state(const QuasiWeierstrass& qw,
                                             const Trajectory& window,
                                             double tol = 1e-7, int theta = -1) {
    window.validate();
    if (theta < 0) theta = qw.q;
    const int w = theta + qw.s - 1;
    if (window.length() != w)
        throw input_error("reconstruct_state: window length must be theta+s-1");
    if (window.u.rows() != qw.m() || window.y.rows() != qw.p())
        throw input_error("reconstruct_state: window dimensions mismatch");

    // z2(t+k) for k = 0..theta-1, each needing inputs u(t+k .. t+k+s-1).
    Matrix z2 = Matrix::Zero(qw.r, theta);
    if (qw.r > 0) {
        Matrix power = Matrix::Identity(qw.r, qw.r);
        for (int k = 0; k < qw.s; ++k) {
            for (int t = 0; t < theta; ++t) z2.col(t) -= power * (qw.B2 * window.u.col(t + k));
            power = qw.N * power;
        }
    }

    // Forced slow response f(k) with f(0) = 0.
    Matrix forced = Matrix::Zero(qw.q, theta);
    for (int k = 1; k < theta; ++k)
        forced.col(k) = qw.A1 * forced.col(k - 1) + qw.B1 * window.u.col(k - 1);

    Vector rhs(theta * qw.p());
    for (int k = 0; k < theta; ++k)
        rhs.segment(k * qw.p(), qw.p()) = window.y.col(k) - qw.C2 * z2.col(k) -
                                          qw.D * window.u.col(k) - qw.C1 * forced.col(k);

    Matrix obs = detail::observability_stack(qw, theta);
    Vector z1_t = min_norm_lstsq(obs, rhs);
    const double residual = theta > 0 ? (obs * z1_t - rhs).norm() : 0.0;
    if (residual > tol * (1.0 + rhs.norm()))
        throw inconsistent_window_error("reconstruct_state: window is not a system trajectory",
                                        residual);

    // Evolve z1 across the window and map back to original coordinates.
    Matrix z1(qw.q, theta);
    if (qw.q > 0 && theta > 0) {
        z1.col(0) = z1_t;
        for (int k = 1; k < theta; ++k)
            z1.col(k) = qw.A1 * z1.col(k - 1) + qw.B1 * window.u.col(k - 1);
    }
    Matrix z(qw.n(), theta);
    z << z1, z2;

    StateReconstruction rec;
    rec.t0 = window.t0;
    rec.x = qw.P * z;
    rec.residual = residual;
    return rec;
}

}  // namespace ddc
