#pragma once

#include <Eigen/Dense>

#include "ddc/errors.hpp"
#include "ddc/hankel.hpp"
#include "ddc/qp.hpp"
#include "ddc/quasi_weierstrass.hpp"
#include "ddc/simulation.hpp"
#include "ddc/trajectory.hpp"

namespace ddc {

namespace detail {

inline Matrix repeat_blockdiag(const Matrix& M, int k) {
    Matrix D = Matrix::Zero(M.rows() * k, M.cols() * k);
    for (int i = 0; i < k; ++i)
        D.block(i * M.rows(), i * M.cols(), M.rows(), M.cols()) = M;
    return D;
}

inline Vector repeat_vector(const Vector& v, int k) {
    Vector out(v.size() * k);
    for (int i = 0; i < k; ++i) out.segment(i * v.size(), v.size()) = v;
    return out;
}

}  // namespace detail

/// Finite-horizon tracking problem: minimize the weighted distance of the
/// predicted window [t, t+L-1] to a stationary setpoint, subject to exact
/// matching of the measured past window and a terminal equality window.
struct OcpSpec {
    int L = 0;             // prediction horizon
    Matrix Q, R;           // p x p, m x m symmetric positive definite weights
    Trajectory past;       // manifest window of length theta + s - 1, ending at t-1
    Vector u_setpoint, y_setpoint;
    int q = 0, s = 1;      // structural indices of the plant
    int theta = -1;        // consistency index; q when negative (standard mode)
    bool terminal_equality = true;
    // Trailing past-window outputs left free: y(t-k) for k < s-1 depends on
    // inputs at or after t, so in closed loop those measurements do not exist
    // yet when the problem is posed. The corresponding columns of past.y are
    // ignored. 0 pins the full window (the open-loop formulation).
    int pending_outputs = 0;

    int consistency_index() const { return theta < 0 ? q : theta; }
    int past_window() const { return consistency_index() + s - 1; }
    int terminal_window() const { return q + s - 1; }
    int full_horizon() const { return past_window() + L; }

    /// Recursive-feasibility guidance for receding-horizon use; violation is
    /// allowed but flagged.
    bool horizon_short() const { return L < 2 * (q + s - 1) + 1; }

    void validate(int m, int p) const {
        if (L < 1) throw input_error("ocp: horizon < 1");
        if (s < 1 || q < 0) throw input_error("ocp: bad structural indices");
        if (Q.rows() != p || Q.cols() != p || R.rows() != m || R.cols() != m)
            throw input_error("ocp: weight dimensions mismatch");
        if (u_setpoint.size() != m || y_setpoint.size() != p)
            throw input_error("ocp: setpoint dimensions mismatch");
        past.validate();
        if (past.length() != past_window())
            throw input_error("ocp: past window length != theta+s-1");
        if (past.u.rows() != m || past.y.rows() != p)
            throw input_error("ocp: past window dimensions mismatch");
        if (pending_outputs < 0 || pending_outputs > s - 1)
            throw input_error("ocp: pending outputs must lie in [0, s-1]");
    }
};

/// Optimal predicted trajectory over [t - past_window, t + L - 1].
struct OcpSolution {
    Matrix u_pred, y_pred;  // columns indexed from t - past_window
    Vector alpha;           // empty for the model-based solve
    double cost = 0.0;      // recomputed from the returned sequences
    double kkt_residual = 0.0;
    bool feasible = true;
};

namespace detail {

inline double tracking_cost(const OcpSpec& spec, const Matrix& u_pred,
                            const Matrix& y_pred) {
    const int w = spec.past_window();
    double cost = 0.0;
    for (int k = 0; k < spec.L; ++k) {
        Vector du = u_pred.col(w + k) - spec.u_setpoint;
        Vector dy = y_pred.col(w + k) - spec.y_setpoint;
        cost += dy.dot(spec.Q * dy) + du.dot(spec.R * du);
    }
    return cost;
}

/// Selects the rows of a stacked (block x horizon) map belonging to blocks
/// [first, first+count).
inline Matrix block_rows(const Matrix& M, int block_size, int first, int count) {
    return M.middleRows(first * block_size, count * block_size);
}

}  // namespace detail

/// Checks that the constant trajectory (u_s, y_s) is reproducible from the
/// Hankel data, i.e. the setpoint is stationary.
inline void validate_setpoint(const HankelRepresentation& rep, const OcpSpec& spec,
                              double tol = 1e-6) {
    Trajectory constant;
    constant.u = spec.u_setpoint.replicate(1, rep.depth());
    constant.y = spec.y_setpoint.replicate(1, rep.depth());
    auto res = membership(rep, constant, tol);
    if (!res.member)
        throw domain_error("ocp: setpoint is not a stationary trajectory of the data behavior");
}

/// Model-based stationarity check: some state x solves
/// (A - E) x = -B u_s,  C x = y_s - D u_s.
inline void validate_setpoint(const DescriptorSystem& sys, const OcpSpec& spec,
                              double tol = 1e-6) {
    Matrix M(sys.n() + sys.p(), sys.n());
    M << sys.A - sys.E, sys.C;
    Vector rhs(sys.n() + sys.p());
    rhs << -sys.B * spec.u_setpoint, spec.y_setpoint - sys.D * spec.u_setpoint;
    Vector x = min_norm_lstsq(M, rhs);
    if ((M * x - rhs).norm() > tol * (1.0 + rhs.norm()))
        throw domain_error("ocp: setpoint is not stationary for the given system");
}

/// Stationarity check in quasi-Weierstrass coordinates: z1 = A1 z1 + B1 u_s,
/// (N - I) z2 = B2 u_s, y_s = C1 z1 + C2 z2 + D u_s must be solvable.
inline void validate_setpoint(const QuasiWeierstrass& qw, const OcpSpec& spec,
                              double tol = 1e-6) {
    const int n = qw.n();
    Matrix M(n + qw.p(), n);
    M.setZero();
    M.topLeftCorner(qw.q, qw.q) = Matrix::Identity(qw.q, qw.q) - qw.A1;
    M.block(qw.q, qw.q, qw.r, qw.r) = qw.N - Matrix::Identity(qw.r, qw.r);
    M.bottomRows(qw.p()) << qw.C1, qw.C2;
    Vector rhs(n + qw.p());
    rhs << qw.B1 * spec.u_setpoint, qw.B2 * spec.u_setpoint,
        spec.y_setpoint - qw.D * spec.u_setpoint;
    Vector z = min_norm_lstsq(M, rhs);
    if ((M * z - rhs).norm() > tol * (1.0 + rhs.norm()))
        throw domain_error("ocp: setpoint is not stationary for the given system");
}

/// Data-driven QP over the Hankel coefficient vector alpha, plus the maps to
/// recover the predicted window.
struct DataDrivenOcp {
    EqualityQp qp;
    const HankelRepresentation* rep = nullptr;
    OcpSpec spec;
};

/// Assembles the QP of the data-driven problem: decision variable alpha,
/// predicted window = [Hu; Hy] alpha, consistency and terminal rows as hard
/// equalities, quadratic tracking cost on the [t, t+L-1] sub-blocks.
inline DataDrivenOcp build_data_driven_ocp(const HankelRepresentation& rep,
                                           const OcpSpec& spec) {
    spec.validate(rep.m(), rep.p());
    if (rep.depth() != spec.full_horizon())
        throw input_error("ocp: representation depth != past_window + L");

    const int m = rep.m(), p = rep.p();
    const int w = spec.past_window();
    const int tw = spec.terminal_window();
    const int F = spec.full_horizon();

    const Matrix& Hu = rep.Hu();
    const Matrix& Hy = rep.Hy();

    // Cost over the L future blocks.
    Matrix Mu = detail::block_rows(Hu, m, w, spec.L);
    Matrix My = detail::block_rows(Hy, p, w, spec.L);
    Matrix Rbar = detail::repeat_blockdiag(spec.R, spec.L);
    Matrix Qbar = detail::repeat_blockdiag(spec.Q, spec.L);
    Vector us_rep = detail::repeat_vector(spec.u_setpoint, spec.L);
    Vector ys_rep = detail::repeat_vector(spec.y_setpoint, spec.L);

    DataDrivenOcp ocp;
    ocp.rep = &rep;
    ocp.spec = spec;
    ocp.qp.H = 2.0 * (Mu.transpose() * Rbar * Mu + My.transpose() * Qbar * My);
    ocp.qp.g = -2.0 * (Mu.transpose() * (Rbar * us_rep) + My.transpose() * (Qbar * ys_rep));

    const int wy = w - spec.pending_outputs;  // pinned output columns
    const int n_term = spec.terminal_equality ? tw : 0;
    const int rows = (m + p) * (w + n_term) - p * spec.pending_outputs;
    ocp.qp.Aeq = Matrix(rows, rep.cols());
    ocp.qp.beq = Vector(rows);
    int at = 0;
    auto append = [&](const Matrix& block, const Vector& rhs) {
        ocp.qp.Aeq.middleRows(at, block.rows()) = block;
        ocp.qp.beq.segment(at, rhs.size()) = rhs;
        at += static_cast<int>(block.rows());
    };
    append(detail::block_rows(Hu, m, 0, w), vectorize(spec.past.u));
    append(detail::block_rows(Hy, p, 0, wy), vectorize(spec.past.y.leftCols(wy)));
    if (spec.terminal_equality) {
        append(detail::block_rows(Hu, m, F - tw, tw), detail::repeat_vector(spec.u_setpoint, tw));
        append(detail::block_rows(Hy, p, F - tw, tw), detail::repeat_vector(spec.y_setpoint, tw));
    }
    return ocp;
}

/// Solves the data-driven problem; alpha is the minimum-norm optimizer.
inline OcpSolution solve_data_driven_ocp(const HankelRepresentation& rep,
                                         const OcpSpec& spec, double feas_tol = 1e-6) {
    validate_setpoint(rep, spec);
    DataDrivenOcp ocp = build_data_driven_ocp(rep, spec);
    QpSolution qps = solve_equality_qp(ocp.qp, feas_tol);

    OcpSolution sol;
    sol.alpha = qps.x;
    sol.u_pred = unstack(rep.Hu() * qps.x, rep.m());
    sol.y_pred = unstack(rep.Hy() * qps.x, rep.p());
    sol.kkt_residual = qps.kkt_residual;
    sol.cost = detail::tracking_cost(spec, sol.u_pred, sol.y_pred);
    return sol;
}

/// Model-based counterpart: the behavior constraint is parameterized by the
/// slow state at the window start and the input sequence (with s-1 phantom
/// inputs past the horizon that realize the non-causal algebraic part), then
/// solved as the same kind of equality-constrained QP.
inline OcpSolution solve_model_based_ocp(const QuasiWeierstrass& qw, const OcpSpec& spec,
                                         double feas_tol = 1e-6) {
    const int m = qw.m(), p = qw.p(), q = qw.q, r = qw.r;
    spec.validate(m, p);
    if (spec.q != q || spec.s != qw.s)
        throw input_error("ocp: spec structural indices disagree with the decomposition");
    validate_setpoint(qw, spec);

    const int w = spec.past_window();
    const int tw = spec.terminal_window();
    const int F = spec.full_horizon();
    const int nu = F + qw.s - 1;  // decision inputs incl. phantom tail
    const int nv = q + m * nu;

    // Affine maps from v = [z1(t-w); u(0..nu-1)] to the stacked signals.
    Matrix Z1 = Matrix::Zero(q * F, nv);  // slow states on the window
    {
        Matrix pow = Matrix::Identity(q, q);
        for (int k = 0; k < F; ++k) {
            Z1.block(k * q, 0, q, q) = pow;
            pow = qw.A1 * pow;
        }
        for (int k = 1; k < F; ++k) {
            // z1(k) = A1 z1(k-1) + B1 u(k-1)
            Z1.middleRows(k * q, q) = qw.A1 * Z1.middleRows((k - 1) * q, q);
            Z1.block(k * q, q + (k - 1) * m, q, m) += qw.B1;
        }
    }
    Matrix Z2 = Matrix::Zero(r * F, nv);
    {
        Matrix pow = Matrix::Identity(r, r);
        for (int j = 0; j < qw.s; ++j) {
            Matrix coeff = -pow * qw.B2;
            for (int k = 0; k < F; ++k) Z2.block(k * r, q + (k + j) * m, r, m) += coeff;
            pow = qw.N * pow;
        }
    }
    Matrix U = Matrix::Zero(m * F, nv);
    for (int k = 0; k < F; ++k) U.block(k * m, q + k * m, m, m).setIdentity();
    Matrix Y = detail::repeat_blockdiag(qw.C1, F) * Z1 +
               detail::repeat_blockdiag(qw.C2, F) * Z2 +
               detail::repeat_blockdiag(qw.D, F) * U;

    Matrix Mu = detail::block_rows(U, m, w, spec.L);
    Matrix My = detail::block_rows(Y, p, w, spec.L);
    Matrix Rbar = detail::repeat_blockdiag(spec.R, spec.L);
    Matrix Qbar = detail::repeat_blockdiag(spec.Q, spec.L);
    Vector us_rep = detail::repeat_vector(spec.u_setpoint, spec.L);
    Vector ys_rep = detail::repeat_vector(spec.y_setpoint, spec.L);

    EqualityQp qp;
    qp.H = 2.0 * (Mu.transpose() * Rbar * Mu + My.transpose() * Qbar * My);
    qp.g = -2.0 * (Mu.transpose() * (Rbar * us_rep) + My.transpose() * (Qbar * ys_rep));

    const int wy = w - spec.pending_outputs;  // pinned output columns
    const int n_term = spec.terminal_equality ? tw : 0;
    qp.Aeq = Matrix((m + p) * (w + n_term) - p * spec.pending_outputs, nv);
    qp.beq = Vector(qp.Aeq.rows());
    int at = 0;
    auto append = [&](const Matrix& block, const Vector& rhs) {
        qp.Aeq.middleRows(at, block.rows()) = block;
        qp.beq.segment(at, rhs.size()) = rhs;
        at += static_cast<int>(block.rows());
    };
    append(detail::block_rows(U, m, 0, w), vectorize(spec.past.u));
    append(detail::block_rows(Y, p, 0, wy), vectorize(spec.past.y.leftCols(wy)));
    if (spec.terminal_equality) {
        append(detail::block_rows(U, m, F - tw, tw), detail::repeat_vector(spec.u_setpoint, tw));
        append(detail::block_rows(Y, p, F - tw, tw), detail::repeat_vector(spec.y_setpoint, tw));
    }

    QpSolution qps = solve_equality_qp(qp, feas_tol);

    OcpSolution sol;
    sol.u_pred = unstack(U * qps.x, m);
    sol.y_pred = unstack(Y * qps.x, p);
    sol.kkt_residual = qps.kkt_residual;
    sol.cost = detail::tracking_cost(spec, sol.u_pred, sol.y_pred);
    return sol;
}

}  // namespace ddc
