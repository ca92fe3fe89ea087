// Command-line front end: system analysis, data collection, single OCP
// solves, receding-horizon runs, and the bundled benchmark experiment.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ddc/ddc.hpp"

namespace fs = std::filesystem;
using ddc::json;
using ddc::Matrix;
using ddc::Vector;

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("DDPC_LOG");
    if (!env) return LogLevel::info;
    std::string v(env);
    if (v == "quiet") return LogLevel::quiet;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::info;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << msg << "\n";
}

void write_output(const std::string& out_dir, const std::string& name, const json& j) {
    if (out_dir.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        fs::create_directories(out_dir);
        ddc::save_json_file((fs::path(out_dir) / name).string(), j);
    }
}

struct Experiment {
    ddc::DescriptorSystem sys;
    ddc::QuasiWeierstrass qw;
    int horizon = 20;
    int data_length = 60;
    int pe_order = 0;  // 0 = derive from structure
    Matrix Q, R;
    std::vector<ddc::SetpointEvent> schedule;
    int total_steps = 60;
    int priming_steps = 10;
    std::uint64_t seed = 1;
};

Matrix weight_from_json(const json& j, int dim) {
    if (j.is_string() && j.get<std::string>() == "identity")
        return Matrix::Identity(dim, dim);
    Matrix W = ddc::matrix_from_json(j);
    if (W.rows() != dim || W.cols() != dim)
        throw ddc::input_error("config: weight dimension mismatch");
    return W;
}

Experiment experiment_from_config(const json& cfg) {
    Experiment ex;
    if (cfg.contains("system") && cfg["system"].is_string())
        ex.sys = ddc::load_system(cfg["system"].get<std::string>());
    else if (cfg.contains("system"))
        ex.sys = ddc::system_from_json(cfg["system"]);
    else
        ex.sys = ddc::benchmark_system();
    ex.qw = ddc::quasi_weierstrass(ex.sys);

    ex.horizon = cfg.value("horizon", 20);
    ex.data_length = cfg.value("data_length", 60);
    ex.pe_order = cfg.value("pe_order", 0);
    ex.total_steps = cfg.value("total_steps", 60);
    ex.priming_steps = cfg.value("priming_steps", 10);
    ex.seed = cfg.value("seed", std::uint64_t{1});
    if (ex.horizon < 1 || ex.data_length < 1 || ex.total_steps < 1)
        throw ddc::input_error("config: numeric fields must be positive");

    ex.Q = cfg.contains("Q") ? weight_from_json(cfg["Q"], ex.sys.p())
                             : Matrix::Identity(ex.sys.p(), ex.sys.p());
    ex.R = cfg.contains("R") ? weight_from_json(cfg["R"], ex.sys.m())
                             : Matrix::Identity(ex.sys.m(), ex.sys.m());

    if (cfg.contains("schedule")) {
        for (const auto& item : cfg["schedule"]) {
            ddc::SetpointEvent ev;
            ev.activation_time = item.at("t").get<int>();
            auto us = item.at("u").get<std::vector<double>>();
            auto ys = item.at("y").get<std::vector<double>>();
            ev.u_setpoint = Eigen::Map<Vector>(us.data(), us.size());
            ev.y_setpoint = Eigen::Map<Vector>(ys.data(), ys.size());
            ex.schedule.push_back(ev);
        }
    }
    return ex;
}

json benchmark_config_json() {
    json cfg;
    cfg["horizon"] = 20;
    cfg["data_length"] = 60;
    cfg["total_steps"] = 60;
    cfg["priming_steps"] = 10;
    cfg["seed"] = 1;
    cfg["Q"] = "identity";
    cfg["R"] = "identity";
    cfg["schedule"] = json::array();
    cfg["schedule"].push_back(
        {{"t", 10}, {"u", {0.0}}, {"y", {20.0, 0.0, 0.0, 20.0}}});
    cfg["schedule"].push_back(
        {{"t", 30}, {"u", {0.0}}, {"y", {-10.0, 0.0, 0.0, -10.0}}});
    return cfg;
}

/// Excitation + simulation: PE input of the structural order, plant started
/// at the origin of the slow subsystem.
ddc::Trajectory collect_data(const Experiment& ex, int pe_order, json* pe_report) {
    const int T = ex.data_length;
    const int m = ex.sys.m();
    const int min_T = (m + 1) * pe_order - 1;
    if (T < min_T)
        throw ddc::input_error("data length " + std::to_string(T) +
                               " too short for excitation order " + std::to_string(pe_order) +
                               "; minimal admissible length is " + std::to_string(min_T));

    Matrix u = ddc::generate_pe_input(T, m, pe_order, -1.0, 1.0, ex.seed);
    // s-1 trailing samples so the simulation covers the full data window.
    std::mt19937_64 rng(ex.seed ^ 0x7261696cULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix u_ext(m, T + ex.qw.s - 1);
    u_ext.leftCols(T) = u;
    for (int t = T; t < T + ex.qw.s - 1; ++t)
        for (int i = 0; i < m; ++i) u_ext(i, t) = dist(rng);

    auto report = ddc::is_persistently_exciting(u, pe_order);
    if (pe_report) {
        (*pe_report)["order"] = report.order;
        (*pe_report)["required_rank"] = report.required_rank;
        (*pe_report)["achieved_rank"] = report.achieved_rank;
        (*pe_report)["smallest_retained_singular_value"] = report.smallest_retained_sv;
        (*pe_report)["length_ok"] = report.length_ok;
        (*pe_report)["verdict"] = report.verdict;
    }
    auto traj = ddc::simulate(ex.qw, Vector::Zero(ex.qw.q), u_ext);
    traj.x.reset();
    return traj;
}

json analysis_report(const ddc::DescriptorSystem& sys) {
    json report;
    report["n"] = sys.n();
    report["m"] = sys.m();
    report["p"] = sys.p();
    const bool regular = ddc::check_regularity(sys);
    report["regular"] = regular;
    if (!regular) return report;
    auto qw = ddc::quasi_weierstrass(sys);
    report["q"] = qw.q;
    report["r"] = qw.r;
    report["s"] = qw.s;
    report["r_controllable"] = ddc::r_controllable(qw);
    const bool obs = ddc::r_observable(qw);
    report["r_observable"] = obs;
    if (obs) report["observability_index"] = ddc::observability_index(qw);
    report["min_horizon"] = 2 * qw.q + 3 * qw.s - 2;
    return report;
}

json run_mpc_experiment(const Experiment& ex, const std::string& out_dir,
                        bool note_data_length) {
    const int q = ex.qw.q, s = ex.qw.s;
    const int pe_order =
        ex.pe_order > 0 ? ex.pe_order : ex.horizon + 2 * (q + s - 1);
    json pe_report;
    ddc::Trajectory data = collect_data(ex, pe_order, &pe_report);
    ddc::HankelRepresentation rep(data, ex.horizon + q + s - 1, s);

    ddc::MpcConfig config;
    config.horizon = ex.horizon;
    config.Q = ex.Q;
    config.R = ex.R;
    config.schedule = ex.schedule;
    config.total_steps = ex.total_steps;
    config.plant = ex.qw;
    config.z1_0 = Vector::Zero(q);
    std::mt19937_64 rng(ex.seed + 1);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    config.priming_input = Matrix(ex.sys.m(), ex.priming_steps);
    for (int t = 0; t < config.priming_input.cols(); ++t)
        for (int i = 0; i < ex.sys.m(); ++i) config.priming_input(i, t) = dist(rng);

    if (config.horizon_warning())
        log_info("warning: horizon below the recursive-feasibility bound 2q+3s-2");

    ddc::ClosedLoopLog log = ddc::run_closed_loop(config, rep);
    ddc::StabilityReport stab = ddc::stability_diagnostics(log, config);

    json summary;
    summary["pe_report"] = pe_report;
    summary["all_feasible"] = stab.all_feasible;
    summary["aborted"] = log.aborted;
    if (log.aborted) {
        summary["abort_time"] = log.abort_time;
        summary["abort_reason"] = log.abort_reason;
    }
    double max_residual = 0.0;
    for (const auto& rec : log.steps) max_residual = std::max(max_residual, rec.solver_residual);
    summary["max_solver_residual"] = max_residual;
    summary["segments"] = json::array();
    for (const auto& seg : stab.segments) {
        json js;
        js["t_start"] = seg.t_start;
        js["t_end"] = seg.t_end;
        js["settled_at"] = seg.settled_at;
        js["cost_nonincreasing"] = seg.cost_nonincreasing;
        summary["segments"].push_back(js);
    }
    if (note_data_length)
        summary["note"] = "data length 60 is used: persistency of excitation of order 26 "
                          "with one input requires at least 51 samples";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        ddc::save_text_file((fs::path(out_dir) / "closed_loop.csv").string(),
                            ddc::closed_loop_log_to_csv(log));
        ddc::save_text_file((fs::path(out_dir) / "data.csv").string(),
                            ddc::trajectory_to_csv(data));
        ddc::save_json_file((fs::path(out_dir) / "summary.json").string(), summary);
    } else {
        std::cout << summary.dump(2) << "\n";
    }
    return summary;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-driven analysis and predictive control for linear descriptor systems"};
    app.require_subcommand(1);

    std::string system_path, config_path, out_dir, data_path, past_path;
    std::uint64_t seed = 1;
    int horizon = 20, data_length = 60, order = 0;

    auto* analyze = app.add_subcommand("analyze", "structural analysis of a system file");
    analyze->add_option("--system", system_path, "system JSON file")->required();
    analyze->add_option("--out", out_dir, "output directory");

    auto* collect = app.add_subcommand("collect", "record a persistently exciting data trajectory");
    collect->add_option("--system", system_path, "system JSON file")->required();
    collect->add_option("--horizon", horizon, "prediction horizon L");
    collect->add_option("--data-length", data_length, "number of data samples T");
    collect->add_option("--seed", seed, "RNG seed");
    collect->add_option("--out", out_dir, "output directory")->required();

    auto* checkpe = app.add_subcommand("check-pe", "persistency-of-excitation rank test");
    checkpe->add_option("--data", data_path, "trajectory CSV")->required();
    checkpe->add_option("--order", order, "excitation order to test")->required();
    checkpe->add_option("--out", out_dir, "output directory");

    auto* ocp = app.add_subcommand("ocp", "solve one optimal control problem both ways");
    ocp->add_option("--config", config_path, "experiment config JSON");
    ocp->add_option("--past", past_path, "past-window trajectory CSV")->required();
    ocp->add_option("--out", out_dir, "output directory");

    auto* mpc = app.add_subcommand("mpc", "closed-loop receding-horizon run");
    mpc->add_option("--config", config_path, "experiment config JSON")->required();
    mpc->add_option("--out", out_dir, "output directory");

    auto* paper = app.add_subcommand("paper-example", "bundled benchmark experiment");
    paper->add_option("--seed", seed, "RNG seed");
    paper->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            write_output(out_dir, "analysis.json", analysis_report(ddc::load_system(system_path)));
        } else if (collect->parsed()) {
            json cfg;
            cfg["system"] = system_path;
            cfg["horizon"] = horizon;
            cfg["data_length"] = data_length;
            cfg["seed"] = seed;
            Experiment ex = experiment_from_config(cfg);
            const int pe_order = ex.horizon + 2 * (ex.qw.q + ex.qw.s - 1);
            json pe_report;
            ddc::Trajectory data = collect_data(ex, pe_order, &pe_report);
            fs::create_directories(out_dir);
            ddc::save_text_file((fs::path(out_dir) / "data.csv").string(),
                                ddc::trajectory_to_csv(data));
            ddc::save_json_file((fs::path(out_dir) / "pe_report.json").string(), pe_report);
            log_info("wrote data.csv and pe_report.json");
        } else if (checkpe->parsed()) {
            ddc::Trajectory data = ddc::load_trajectory_csv(data_path);
            auto report = ddc::is_persistently_exciting(data.u, order);
            json j;
            j["order"] = report.order;
            j["required_rank"] = report.required_rank;
            j["achieved_rank"] = report.achieved_rank;
            j["smallest_retained_singular_value"] = report.smallest_retained_sv;
            j["length_ok"] = report.length_ok;
            j["verdict"] = report.verdict;
            write_output(out_dir, "pe_report.json", j);
        } else if (ocp->parsed()) {
            json cfg = config_path.empty() ? benchmark_config_json()
                                           : ddc::load_json_file(config_path);
            Experiment ex = experiment_from_config(cfg);
            ddc::Trajectory past = ddc::load_trajectory_csv(past_path);

            ddc::OcpSpec spec;
            spec.L = ex.horizon;
            spec.Q = ex.Q;
            spec.R = ex.R;
            spec.q = ex.qw.q;
            spec.s = ex.qw.s;
            spec.past = past;
            ddc::SetpointEvent active;
            if (!ex.schedule.empty())
                active = ex.schedule.front();
            else {
                active.u_setpoint = Vector::Zero(ex.sys.m());
                active.y_setpoint = Vector::Zero(ex.sys.p());
            }
            spec.u_setpoint = active.u_setpoint;
            spec.y_setpoint = active.y_setpoint;

            const int pe_order = ex.horizon + 2 * (ex.qw.q + ex.qw.s - 1);
            ddc::Trajectory data = collect_data(ex, pe_order, nullptr);
            ddc::HankelRepresentation rep(data, spec.full_horizon(), ex.qw.s);

            json result;
            try {
                result["data_driven"] = ddc::ocp_solution_to_json(
                    ddc::solve_data_driven_ocp(rep, spec));
            } catch (const ddc::infeasible_error& e) {
                result["data_driven"] = {{"feasible", false},
                                         {"constraint_residual", e.residual()}};
            }
            try {
                result["model_based"] = ddc::ocp_solution_to_json(
                    ddc::solve_model_based_ocp(ex.qw, spec));
            } catch (const ddc::infeasible_error& e) {
                result["model_based"] = {{"feasible", false},
                                         {"constraint_residual", e.residual()}};
            }
            if (result["data_driven"].value("feasible", true) &&
                result["model_based"].value("feasible", true)) {
                const double cd = result["data_driven"]["cost"].get<double>();
                const double cm = result["model_based"]["cost"].get<double>();
                result["relative_cost_gap"] = std::abs(cd - cm) / (1.0 + cm);
            }
            write_output(out_dir, "ocp.json", result);
        } else if (mpc->parsed()) {
            Experiment ex = experiment_from_config(ddc::load_json_file(config_path));
            run_mpc_experiment(ex, out_dir, false);
        } else if (paper->parsed()) {
            json cfg = benchmark_config_json();
            cfg["seed"] = seed;
            Experiment ex = experiment_from_config(cfg);
            run_mpc_experiment(ex, out_dir, true);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
