#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "test_support.hpp"

using namespace ddc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& file = "") const {
        return (file.empty() ? path : path / file).string();
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DDC_CLI_PATH) + " " + args + " 2>/dev/null";
    return std::system(cmd.c_str());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("analyze reports the benchmark invariants") {
    TempDir dir("ddc_cli_analyze");
    save_json_file(dir.str("system.json"), system_to_json(benchmark_system()));
    REQUIRE(run_cli("analyze --system " + dir.str("system.json") + " --out " + dir.str()) == 0);
    json report = load_json_file(dir.str("analysis.json"));
    CHECK(report["regular"] == true);
    CHECK(report["q"] == 2);
    CHECK(report["r"] == 2);
    CHECK(report["s"] == 2);
    CHECK(report["r_controllable"] == true);
    CHECK(report["r_observable"] == true);
    CHECK(report["min_horizon"] == 8);
}

TEST_CASE("analyze flags a singular pencil without failing") {
    TempDir dir("ddc_cli_singular");
    DescriptorSystem sys;
    sys.E = Matrix::Zero(2, 2);
    sys.A = Matrix{{1, 0}, {0, 0}};
    sys.B = Matrix{{1}, {1}};
    sys.C = Matrix{{1, 0}};
    sys.D = Matrix::Zero(1, 1);
    save_json_file(dir.str("system.json"), system_to_json(sys));
    REQUIRE(run_cli("analyze --system " + dir.str("system.json") + " --out " + dir.str()) == 0);
    json report = load_json_file(dir.str("analysis.json"));
    CHECK(report["regular"] == false);
}

TEST_CASE("collect rejects a too-short data length and names the minimum") {
    TempDir dir("ddc_cli_collect_short");
    save_json_file(dir.str("system.json"), system_to_json(benchmark_system()));
    CHECK(run_cli("collect --system " + dir.str("system.json") +
                  " --horizon 20 --data-length 30 --out " + dir.str()) != 0);
}

TEST_CASE("collect writes a persistently exciting trajectory") {
    TempDir dir("ddc_cli_collect");
    save_json_file(dir.str("system.json"), system_to_json(benchmark_system()));
    REQUIRE(run_cli("collect --system " + dir.str("system.json") +
                    " --horizon 20 --data-length 60 --seed 3 --out " + dir.str()) == 0);
    json pe = load_json_file(dir.str("pe_report.json"));
    CHECK(pe["verdict"] == true);
    CHECK(pe["order"] == 26);

    auto traj = load_trajectory_csv(dir.str("data.csv"));
    CHECK(traj.length() == 60);

    // Deterministic re-run yields byte-identical output.
    std::string first = read_file(dir.str("data.csv"));
    REQUIRE(run_cli("collect --system " + dir.str("system.json") +
                    " --horizon 20 --data-length 60 --seed 3 --out " + dir.str()) == 0);
    CHECK(read_file(dir.str("data.csv")) == first);
}

TEST_CASE("check-pe on collected data") {
    TempDir dir("ddc_cli_checkpe");
    save_json_file(dir.str("system.json"), system_to_json(benchmark_system()));
    REQUIRE(run_cli("collect --system " + dir.str("system.json") +
                    " --horizon 10 --data-length 60 --seed 4 --out " + dir.str()) == 0);
    REQUIRE(run_cli("check-pe --data " + dir.str("data.csv") + " --order 16 --out " +
                    dir.str()) == 0);
    json pe = load_json_file(dir.str("pe_report.json"));
    CHECK(pe["verdict"] == true);
}

TEST_CASE("ocp subcommand compares both solvers") {
    TempDir dir("ddc_cli_ocp");
    auto qw = quasi_weierstrass(benchmark_system());
    std::mt19937_64 rng(173);
    auto past = testing::random_manifest_window(qw, qw.q + qw.s - 1, rng);
    save_text_file(dir.str("past.csv"), trajectory_to_csv(past));

    json cfg;
    cfg["horizon"] = 10;
    cfg["data_length"] = 60;
    cfg["seed"] = 5;
    save_json_file(dir.str("config.json"), cfg);

    REQUIRE(run_cli("ocp --config " + dir.str("config.json") + " --past " + dir.str("past.csv") +
                    " --out " + dir.str()) == 0);
    json result = load_json_file(dir.str("ocp.json"));
    CHECK(result["relative_cost_gap"].get<double>() <= 1e-6);
}

TEST_CASE("paper-example preset runs to convergence") {
    TempDir dir("ddc_cli_paper");
    REQUIRE(run_cli("paper-example --seed 1 --out " + dir.str()) == 0);
    json summary = load_json_file(dir.str("summary.json"));
    CHECK(summary["all_feasible"] == true);
    CHECK(summary["aborted"] == false);
    REQUIRE(summary["segments"].size() >= 2);
    for (const auto& seg : summary["segments"]) {
        CHECK(seg["settled_at"].get<int>() >= 0);
        CHECK(seg["cost_nonincreasing"] == true);
    }
    CHECK(fs::exists(dir.str("closed_loop.csv")));
    CHECK(fs::exists(dir.str("data.csv")));
}
