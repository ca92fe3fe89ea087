#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ddc/descriptor.hpp"
#include "ddc/errors.hpp"
#include "ddc/mpc.hpp"
#include "ddc/trajectory.hpp"

namespace ddc {

using nlohmann::json;

/// Double -> shortest round-trip-exact decimal string (17 significant digits).
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json matrix_to_json(const Matrix& M) {
    json j;
    j["rows"] = M.rows();
    j["cols"] = M.cols();
    std::vector<double> data;
    data.reserve(M.size());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index k = 0; k < M.cols(); ++k) data.push_back(M(i, k));
    j["data"] = data;
    return j;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw input_error("matrix json: expected fields rows/cols/data");
    const int rows = j["rows"].get<int>();
    const int cols = j["cols"].get<int>();
    const auto data = j["data"].get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<int>(data.size()) != rows * cols)
        throw input_error("matrix json: data length != rows*cols");
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) M(i, k) = data[i * cols + k];
    return M;
}

inline json system_to_json(const DescriptorSystem& sys) {
    json j;
    j["E"] = matrix_to_json(sys.E);
    j["A"] = matrix_to_json(sys.A);
    j["B"] = matrix_to_json(sys.B);
    j["C"] = matrix_to_json(sys.C);
    j["D"] = matrix_to_json(sys.D);
    return j;
}

inline DescriptorSystem system_from_json(const json& j) {
    for (const char* key : {"E", "A", "B", "C", "D"})
        if (!j.contains(key))
            throw input_error(std::string("system json: missing key ") + key);
    DescriptorSystem sys{matrix_from_json(j["E"]), matrix_from_json(j["A"]),
                         matrix_from_json(j["B"]), matrix_from_json(j["C"]),
                         matrix_from_json(j["D"])};
    sys.validate();
    return sys;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open file for writing: " + path);
    out << j.dump(2) << "\n";
}

inline DescriptorSystem load_system(const std::string& path) {
    return system_from_json(load_json_file(path));
}

/// Trajectory CSV: header t,u_0..u_{m-1},y_0..y_{p-1}, one row per time step.
inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t";
    for (int i = 0; i < traj.u.rows(); ++i) out << ",u_" << i;
    for (int i = 0; i < traj.y.rows(); ++i) out << ",y_" << i;
    out << "\n";
    for (int k = 0; k < traj.length(); ++k) {
        out << (traj.t0 + k);
        for (int i = 0; i < traj.u.rows(); ++i) out << "," << format_double(traj.u(i, k));
        for (int i = 0; i < traj.y.rows(); ++i) out << "," << format_double(traj.y(i, k));
        out << "\n";
    }
    return out.str();
}

inline Trajectory trajectory_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw input_error("trajectory csv: empty file");
    int m = 0, p = 0;
    {
        std::stringstream header(line);
        std::string field;
        while (std::getline(header, field, ',')) {
            if (field.rfind("u_", 0) == 0) ++m;
            if (field.rfind("y_", 0) == 0) ++p;
        }
        if (m == 0 || p == 0) throw input_error("trajectory csv: bad header");
    }
    std::vector<std::vector<double>> rows;
    int t0 = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(row, field, ',')) values.push_back(std::stod(field));
        if (static_cast<int>(values.size()) != 1 + m + p)
            throw input_error("trajectory csv: wrong column count");
        if (first) {
            t0 = static_cast<int>(values[0]);
            first = false;
        }
        rows.push_back(values);
    }
    if (rows.empty()) throw input_error("trajectory csv: no data rows");
    Trajectory traj;
    traj.t0 = t0;
    traj.u = Matrix(m, rows.size());
    traj.y = Matrix(p, rows.size());
    for (size_t k = 0; k < rows.size(); ++k) {
        for (int i = 0; i < m; ++i) traj.u(i, k) = rows[k][1 + i];
        for (int i = 0; i < p; ++i) traj.y(i, k) = rows[k][1 + m + i];
    }
    return traj;
}

inline Trajectory load_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    return trajectory_from_csv(in);
}

/// Closed-loop log CSV: t,u_*,y_*,y_ref_*,cost,feasible plus optional x_*
/// columns. Priming rows carry zero cost and the origin reference.
inline std::string closed_loop_log_to_csv(const ClosedLoopLog& log) {
    const int m = static_cast<int>(log.priming.u.rows());
    const int p = static_cast<int>(log.priming.y.rows());
    const bool with_states =
        !log.steps.empty() && log.steps.front().x.has_value() && log.priming.x.has_value();
    const int n = with_states ? static_cast<int>(log.priming.x->rows()) : 0;

    std::ostringstream out;
    out << "t";
    for (int i = 0; i < m; ++i) out << ",u_" << i;
    for (int i = 0; i < p; ++i) out << ",y_" << i;
    for (int i = 0; i < p; ++i) out << ",y_ref_" << i;
    out << ",cost,feasible";
    for (int i = 0; i < n; ++i) out << ",x_" << i;
    out << "\n";

    for (int k = 0; k < log.priming.length(); ++k) {
        out << (log.priming.t0 + k);
        for (int i = 0; i < m; ++i) out << "," << format_double(log.priming.u(i, k));
        for (int i = 0; i < p; ++i) out << "," << format_double(log.priming.y(i, k));
        for (int i = 0; i < p; ++i) out << "," << format_double(0.0);
        out << "," << format_double(0.0) << ",1";
        for (int i = 0; i < n; ++i) out << "," << format_double((*log.priming.x)(i, k));
        out << "\n";
    }
    for (const auto& rec : log.steps) {
        out << rec.t;
        for (int i = 0; i < m; ++i) out << "," << format_double(rec.u(i));
        for (int i = 0; i < p; ++i) out << "," << format_double(rec.y(i));
        for (int i = 0; i < p; ++i) out << "," << format_double(rec.y_ref(i));
        out << "," << format_double(rec.cost) << "," << (rec.feasible ? 1 : 0);
        for (int i = 0; i < n; ++i)
            out << "," << format_double(rec.x ? (*rec.x)(i) : 0.0);
        out << "\n";
    }
    return out.str();
}

inline void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open file for writing: " + path);
    out << text;
}

/// Debug dump of an equality-constrained QP instance.
inline json qp_to_json(const EqualityQp& qp) {
    json j;
    j["H"] = matrix_to_json(qp.H);
    j["g"] = matrix_to_json(qp.g);
    j["Aeq"] = matrix_to_json(qp.Aeq);
    j["beq"] = matrix_to_json(qp.beq);
    return j;
}

inline json ocp_solution_to_json(const OcpSolution& sol) {
    json j;
    j["u_pred"] = matrix_to_json(sol.u_pred);
    j["y_pred"] = matrix_to_json(sol.y_pred);
    j["alpha"] = matrix_to_json(sol.alpha);
    j["cost"] = sol.cost;
    j["kkt_residual"] = sol.kkt_residual;
    j["feasible"] = sol.feasible;
    return j;
}

}  // namespace ddc
