#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ddc/errors.hpp"
#include "ddc/hankel.hpp"
#include "ddc/ocp.hpp"
#include "ddc/quasi_weierstrass.hpp"
#include "ddc/simulation.hpp"
#include "ddc/trajectory.hpp"

namespace ddc {

struct SetpointEvent {
    int activation_time = 0;
    Vector u_setpoint, y_setpoint;
};

/// Receding-horizon configuration. The plant in the loop is the decomposed
/// descriptor system itself; the priming input covers the pre-control phase.
struct MpcConfig {
    int horizon = 0;
    Matrix Q, R;
    std::vector<SetpointEvent> schedule;  // strictly increasing activation times
    int total_steps = 0;
    QuasiWeierstrass plant;
    Vector z1_0;
    Matrix priming_input;  // m x priming_length
    bool log_states = true;
    double feas_tol = 1e-6;
    double membership_tol = 1e-7;

    int priming_length() const { return static_cast<int>(priming_input.cols()); }

    void validate() const {
        const int w = plant.q + plant.s - 1;
        if (horizon < plant.s)
            throw input_error("mpc: horizon must cover at least s steps");
        if (priming_length() < w || priming_length() < plant.s)
            throw input_error("mpc: priming phase shorter than the past window");
        if (total_steps <= priming_length())
            throw input_error("mpc: total steps must exceed the priming phase");
        for (size_t i = 1; i < schedule.size(); ++i)
            if (schedule[i].activation_time <= schedule[i - 1].activation_time)
                throw input_error("mpc: schedule times must be strictly increasing");
    }

    bool horizon_warning() const { return horizon < 2 * plant.q + 3 * plant.s - 2; }

    /// Setpoint active at time t (origin before the first activation).
    SetpointEvent active_setpoint(int t) const {
        SetpointEvent active;
        active.u_setpoint = Vector::Zero(plant.m());
        active.y_setpoint = Vector::Zero(plant.p());
        for (const auto& ev : schedule)
            if (ev.activation_time <= t) active = ev;
        return active;
    }
};

struct StepRecord {
    int t = 0;
    Vector u, y;
    std::optional<Vector> x;  // reconstructed after the optimization
    Vector u_ref, y_ref;
    double cost = 0.0;
    double solver_residual = 0.0;
    bool feasible = true;
};

struct ClosedLoopLog {
    Trajectory priming;  // full trajectory of the pre-control phase
    std::vector<StepRecord> steps;
    bool aborted = false;
    int abort_time = -1;
    std::string abort_reason;
};

/// Rolling state of the receding-horizon loop. The newest s-1 columns of
/// y_hist are provisional (computed from the latest plan's future inputs);
/// older columns are finalized plant outputs under the inputs actually applied.
struct LoopState {
    int t = 0;
    Matrix u_hist, y_hist;
    Matrix z1_hist;  // q x (t+1), slow plant states on [0, t]
    Matrix u_tail;   // m x (s-1), the latest plan's inputs at times t, t+1, ...
};

namespace detail {

/// Algebraic plant state at time tau; inputs beyond the recorded history are
/// taken from the plan (columns of u_plan index times plan_t0, plan_t0+1, ...).
inline Vector fast_state(const QuasiWeierstrass& qw, int tau, const Matrix& u_hist,
                         const Matrix& u_plan, int plan_t0) {
    Vector z2 = Vector::Zero(qw.r);
    if (qw.r == 0) return z2;
    Matrix power = Matrix::Identity(qw.r, qw.r);
    for (int k = 0; k < qw.s; ++k) {
        const int time = tau + k;
        Vector u = time < u_hist.cols() ? Vector(u_hist.col(time))
                                        : Vector(u_plan.col(time - plan_t0));
        z2 -= power * (qw.B2 * u);
        power = qw.N * power;
    }
    return z2;
}

}  // namespace detail

/// One iteration: solve the data-driven problem on the current past window,
/// apply the first input, advance the slow plant state, and record outputs.
/// The newest s-1 measurements do not exist yet when the problem is posed
/// (they depend on inputs at or after t), so they enter the problem as free
/// variables; applying u(t) finalizes the measurement at t-s+1.
inline StepRecord mpc_step(LoopState& state, const HankelRepresentation& rep,
                           const MpcConfig& config) {
    const QuasiWeierstrass& qw = config.plant;
    const int w = qw.q + qw.s - 1;
    const int t = state.t;

    SetpointEvent active = config.active_setpoint(t);
    OcpSpec spec;
    spec.L = config.horizon;
    spec.Q = config.Q;
    spec.R = config.R;
    spec.q = qw.q;
    spec.s = qw.s;
    spec.pending_outputs = std::min(qw.s - 1, w);
    spec.u_setpoint = active.u_setpoint;
    spec.y_setpoint = active.y_setpoint;
    spec.past.t0 = t - w;
    spec.past.u = state.u_hist.middleCols(t - w, w);
    spec.past.y = state.y_hist.middleCols(t - w, w);

    OcpSolution sol = solve_data_driven_ocp(rep, spec, config.feas_tol);

    StepRecord rec;
    rec.t = t;
    rec.u_ref = active.u_setpoint;
    rec.y_ref = active.y_setpoint;
    rec.cost = sol.cost;
    rec.solver_residual = sol.kkt_residual;
    rec.u = sol.u_pred.col(w);

    state.u_hist.conservativeResize(Eigen::NoChange, t + 1);
    state.y_hist.conservativeResize(Eigen::NoChange, t + 1);
    state.z1_hist.conservativeResize(Eigen::NoChange, t + 2);
    state.u_hist.col(t) = rec.u;
    state.z1_hist.col(t + 1) =
        qw.q > 0 ? Vector(qw.A1 * state.z1_hist.col(t) + qw.B1 * rec.u) : Vector(0);

    // Refresh every output that depends on u(t) or later. The oldest of them,
    // y(t-s+1), now uses applied inputs only and becomes final; the newer ones
    // stay provisional under the current plan.
    for (int tau = std::max(0, t - qw.s + 1); tau <= t; ++tau) {
        Vector z2 = detail::fast_state(qw, tau, state.u_hist, sol.u_pred, t - w);
        state.y_hist.col(tau) =
            qw.C1 * state.z1_hist.col(tau) + qw.C2 * z2 + qw.D * state.u_hist.col(tau);
    }
    rec.y = state.y_hist.col(t);
    if (qw.s > 1 && sol.u_pred.cols() >= w + qw.s)
        state.u_tail = sol.u_pred.middleCols(w + 1, qw.s - 1);
    state.t = t + 1;
    return rec;
}

/// Full receding-horizon run: priming phase simulated from the initial
/// condition, then one OCP solve per step until total_steps. An infeasible
/// step aborts the run and is recorded with diagnostics. After the run the
/// provisional outputs are finalized against the inputs actually applied and
/// the logged states are reconstructed from the finalized record.
inline ClosedLoopLog run_closed_loop(const MpcConfig& config,
                                     const HankelRepresentation& rep) {
    config.validate();
    const QuasiWeierstrass& qw = config.plant;
    const int w = qw.q + qw.s - 1;
    const int t_start = config.priming_length();

    ClosedLoopLog log;

    LoopState state;
    state.t = t_start;
    state.u_hist = config.priming_input;
    // Slow plant states through the priming inputs.
    state.z1_hist = Matrix(qw.q, t_start + 1);
    state.z1_hist.col(0) = config.z1_0;
    for (int k = 0; k < t_start; ++k)
        state.z1_hist.col(k + 1) = qw.q > 0
            ? Vector(qw.A1 * state.z1_hist.col(k) + qw.B1 * config.priming_input.col(k))
            : Vector(0);
    // Priming outputs: the last s-1 depend on inputs the loop has not chosen
    // yet and stay provisional until the first control steps finalize them.
    Trajectory primed = simulate(qw, config.z1_0, config.priming_input, 0);
    state.y_hist = Matrix::Zero(qw.p(), t_start);
    state.y_hist.leftCols(primed.length()) = primed.y;

    for (int t = t_start; t < config.total_steps; ++t) {
        try {
            log.steps.push_back(mpc_step(state, rep, config));
        } catch (const infeasible_error& e) {
            log.aborted = true;
            log.abort_time = t;
            log.abort_reason = e.what();
            StepRecord rec;
            rec.t = t;
            rec.feasible = false;
            rec.solver_residual = e.residual();
            SetpointEvent active = config.active_setpoint(t);
            rec.u = Vector::Zero(qw.m());
            rec.y = Vector::Zero(qw.p());
            rec.u_ref = active.u_setpoint;
            rec.y_ref = active.y_setpoint;
            log.steps.push_back(rec);
            break;
        }
    }

    // Finalized record: u over [0, state.t), y finalized against applied
    // inputs (the newest s-1 outputs realize the last plan's tail).
    log.priming.t0 = 0;
    log.priming.u = state.u_hist.leftCols(t_start);
    log.priming.y = state.y_hist.leftCols(t_start);
    for (auto& rec : log.steps)
        if (rec.feasible) rec.y = state.y_hist.col(rec.t);

    // Plant states from the finalized record, for illustration.
    if (config.log_states && !log.aborted && !log.steps.empty()) {
        Matrix u_ext(qw.m(), state.t + qw.s - 1);
        u_ext.leftCols(state.t) = state.u_hist;
        if (qw.s > 1) u_ext.rightCols(qw.s - 1) = state.u_tail;
        auto x_at = [&](int tau) {
            Vector z(qw.n());
            z << state.z1_hist.col(tau), detail::fast_state(qw, tau, u_ext, u_ext, 0);
            return Vector(qw.P * z);
        };
        Matrix xp(qw.n(), t_start);
        for (int tau = 0; tau < t_start; ++tau) xp.col(tau) = x_at(tau);
        log.priming.x = xp;
        for (auto& rec : log.steps) rec.x = x_at(rec.t);
    }
    return log;
}

struct SegmentDiagnostics {
    int t_start = 0, t_end = 0;  // half-open segment of constant setpoint
    int settled_at = -1;         // first index with sustained tracking, -1 if never
    bool cost_nonincreasing = true;
    double max_cost_increase = 0.0;
};

struct StabilityReport {
    std::vector<SegmentDiagnostics> segments;
    bool all_feasible = true;
    int first_infeasible = -1;
};

/// Post-run checks of the receding-horizon guarantees: sustained setpoint
/// tracking, optimal-cost descent between setpoint switches, and feasibility
/// of every step. The sustain window is q+s steps.
inline StabilityReport stability_diagnostics(const ClosedLoopLog& log,
                                             const MpcConfig& config,
                                             double tol = 1e-3,
                                             double cost_slack = 1e-9) {
    StabilityReport report;
    for (const auto& rec : log.steps)
        if (!rec.feasible && report.first_infeasible < 0) {
            report.all_feasible = false;
            report.first_infeasible = rec.t;
        }

    const int sustain = config.plant.q + config.plant.s;
    size_t i = 0;
    while (i < log.steps.size()) {
        size_t j = i;
        while (j < log.steps.size() && log.steps[j].feasible &&
               (log.steps[j].y_ref - log.steps[i].y_ref).norm() == 0.0 &&
               (log.steps[j].u_ref - log.steps[i].u_ref).norm() == 0.0)
            ++j;
        if (j == i) {  // leading infeasible record
            ++i;
            continue;
        }

        SegmentDiagnostics seg;
        seg.t_start = log.steps[i].t;
        seg.t_end = log.steps[j - 1].t + 1;
        for (size_t k = i; k < j; ++k) {
            bool ok = true;
            for (size_t l = k; l < std::min(j, k + sustain); ++l)
                ok = ok && (log.steps[l].y - log.steps[l].y_ref).lpNorm<Eigen::Infinity>() <= tol;
            if (ok && j - k >= static_cast<size_t>(sustain)) {
                seg.settled_at = log.steps[k].t;
                break;
            }
        }
        for (size_t k = i + 1; k < j; ++k) {
            const double rise = log.steps[k].cost - log.steps[k - 1].cost;
            if (rise > cost_slack * (1.0 + std::abs(log.steps[k - 1].cost))) {
                seg.cost_nonincreasing = false;
                seg.max_cost_increase = std::max(seg.max_cost_increase, rise);
            }
        }
        report.segments.push_back(seg);
        if (j < log.steps.size() && !log.steps[j].feasible) ++j;
        i = j;
    }
    return report;
}

}  // namespace ddc
