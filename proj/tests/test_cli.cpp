// SPDX-License-Identifier: Apache-2.0
//
// wetsim - training design and link-level simulation for multi-antenna
// wireless energy transfer
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <string>

#include "wetsim/experiment.hpp"

using namespace wetsim;

namespace {

LambdaTable shared_table() {
    LambdaTable table(20260811ULL, 400000);
    const std::filesystem::path cache = std::filesystem::path(WETSIM_DATA_DIR) /
                                        "lambda_cache.csv";
    table.load_csv(cache);
    return table;
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(WETSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("config text parsing") {
    const std::string text = R"(
# experiment description
scenario = rayleigh

[system]
M = 5
N = 10      ; inline comment
T = 50

[run]
trials = 2000
seed = 9
)";
    const KeyValueMap map = parse_config_text(text);
    CHECK(map.at("scenario") == "rayleigh");
    CHECK(map.at("system.M") == "5");
    CHECK(map.at("system.N") == "10");
    CHECK(map.at("run.trials") == "2000");

    KeyValueMap patched = map;
    apply_override(patched, "system.T=75");
    CHECK(patched.at("system.T") == "75");
    CHECK_THROWS_AS(apply_override(patched, "no-equals-sign"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[unterminated\nx=1"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("loose line without equals"), ConfigError);
}

TEST_CASE("typed config extraction and unit conversions") {
    KeyValueMap map;
    map["scenario"] = "miso_rician";
    map["system.M"] = "5";
    map["system.N"] = "1";
    map["system.T"] = "200";
    map["system.K_db"] = "3";
    map["system.sigma_r2_dbm"] = "-90";
    const ExperimentConfig cfg = ExperimentConfig::from_map(map);
    CHECK(cfg.k == doctest::Approx(1.9952623149688795).epsilon(1e-12));
    CHECK(cfg.sigma_r2_watts == doctest::Approx(1e-12).epsilon(1e-12));
    CHECK(cfg.scenario == "miso_rician");

    SUBCASE("unknown keys are rejected") {
        KeyValueMap bad = map;
        bad["system.bogus"] = "1";
        CHECK_THROWS_AS(ExperimentConfig::from_map(bad), ConfigError);
    }
    SUBCASE("K and K_db are mutually exclusive") {
        KeyValueMap bad = map;
        bad["system.K"] = "2";
        CHECK_THROWS_AS(ExperimentConfig::from_map(bad), ConfigError);
    }
    SUBCASE("two sweep variables are rejected") {
        KeyValueMap bad = map;
        bad["sweep.variable"] = "T,M";
        bad["sweep.values"] = "10,20";
        CHECK_THROWS_AS(ExperimentConfig::from_map(bad), ConfigError);
    }
    SUBCASE("scenario consistency") {
        KeyValueMap bad = map;
        bad["system.N"] = "2";
        CHECK_THROWS_AS(ExperimentConfig::from_map(bad), ConfigError);
        KeyValueMap ray;
        ray["scenario"] = "rayleigh";
        ray["system.K"] = "1";
        CHECK_THROWS_AS(ExperimentConfig::from_map(ray), ConfigError);
    }
    SUBCASE("unknown sweep variable is rejected") {
        KeyValueMap bad = map;
        bad["sweep.variable"] = "frequency";
        bad["sweep.values"] = "1,2";
        CHECK_THROWS_AS(ExperimentConfig::from_map(bad), ConfigError);
    }
}

TEST_CASE("result CSV round-trips through write and read") {
    std::vector<ResultRow> rows(2);
    rows[0].sweep_value = 25.0;
    rows[0].n1_star = 2;
    rows[0].tau_star = 2;
    rows[0].pr_star_watts = 4.603614368291374e-06;
    rows[0].predicted_net_joules = 1.5738612983657e-4;
    rows[1].sweep_value = 50.0;
    rows[1].n1_star = 5;
    rows[1].mc_net_joules = 3.52e-4;
    rows[1].mc_halfwidth = 1.1e-6;
    rows[1].t_boundary = 16.0;

    const auto path = std::filesystem::temp_directory_path() / "wetsim_rows.csv";
    write_result_csv(path, {"test", 42}, rows);
    const auto [meta, loaded] = read_result_csv(path);
    CHECK(meta.command == "test");
    CHECK(meta.seed == 42);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].sweep_value == rows[0].sweep_value);
    CHECK(loaded[0].n1_star == rows[0].n1_star);
    CHECK(loaded[0].pr_star_watts == rows[0].pr_star_watts);
    CHECK(loaded[0].predicted_net_joules == rows[0].predicted_net_joules);
    CHECK(!loaded[0].mc_net_joules.has_value());
    CHECK(!loaded[0].benchmark_ideal.has_value());
    CHECK(loaded[1].mc_net_joules == rows[1].mc_net_joules);
    CHECK(loaded[1].t_boundary == rows[1].t_boundary);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(read_result_csv("/nonexistent/rows.csv"), IoError);
    CHECK_THROWS_AS(write_result_csv("/nonexistent-dir/rows.csv", {"x", 1}, rows), IoError);
}

TEST_CASE("single-antenna training threshold") {
    SystemParams p;
    p.m = 5;
    p.n = 1;
    p.t = 200;
    p.k = 2.0;
    p.beta = 1e-6;
    p.pf = 1.0;
    p.eta = 0.5;
    p.sigma_r2 = 1e-12;

    // Frozen from direct evaluation of the decision rule at these
    // parameters (K = 2, ESNR = 0.5).
    CHECK(miso_training_threshold_t(p) == 16);
    p.m = 2;
    CHECK(miso_training_threshold_t(p) == 43);
    p.m = 3;
    CHECK(miso_training_threshold_t(p) == 25);
    p.m = 8;
    CHECK(miso_training_threshold_t(p) == 11);
    p.m = 1;
    CHECK(!miso_training_threshold_t(p).has_value());

    // The threshold is exact: training wins at the boundary and not below.
    for (int m : {2, 3, 5, 8}) {
        SystemParams q = p;
        q.m = m;
        const int boundary = *miso_training_threshold_t(q);
        q.t = boundary;
        CHECK(miso_should_train(q));
        q.t = boundary - 1;
        CHECK(!miso_should_train(q));
    }
}

TEST_CASE("training region rows: higher Rician factor shrinks the region") {
    LambdaTable table = shared_table();
    KeyValueMap preset = figure_preset("fig7");
    const ExperimentConfig cfg3 = ExperimentConfig::from_map(preset);
    preset["system.K_db"] = "10";
    const ExperimentConfig cfg10 = ExperimentConfig::from_map(preset);

    const auto rows3 = run_figure("fig7", cfg3, table);
    const auto rows10 = run_figure("fig7", cfg10, table);
    REQUIRE(rows3.size() == rows10.size());
    for (std::size_t i = 0; i < rows3.size(); ++i) {
        REQUIRE(rows3[i].t_boundary.has_value());
        REQUIRE(rows10[i].t_boundary.has_value());
        CHECK(*rows10[i].t_boundary > *rows3[i].t_boundary);
    }
}

TEST_CASE("candidate-count figure: analytic net rises monotonically for long blocks") {
    LambdaTable table = shared_table();
    KeyValueMap preset = figure_preset("fig3");
    preset["system.T"] = "100";
    preset["output.mc"] = "false";
    const ExperimentConfig cfg = ExperimentConfig::from_map(preset);
    const auto rows = run_figure("fig3", cfg, table);
    REQUIRE(rows.size() == 11);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(*rows[i].predicted_net_joules > *rows[i - 1].predicted_net_joules);
    }
}

TEST_CASE("optimal-count figure thresholds for full training") {
    LambdaTable table = shared_table();

    auto first_t_training_all = [&](const std::string &m) {
        KeyValueMap preset = figure_preset("fig4");
        preset["system.M"] = m;
        const ExperimentConfig cfg = ExperimentConfig::from_map(preset);
        const auto rows = run_figure("fig4", cfg, table);
        for (const auto &row : rows) {
            if (row.n1_star == 10) {
                return row.sweep_value;
            }
        }
        return -1.0;
    };

    CHECK(first_t_training_all("2") >= 150.0);
    CHECK(first_t_training_all("5") <= 80.0);

    // No training ever pays off with a single transmit antenna.
    KeyValueMap preset = figure_preset("fig4");
    preset["system.M"] = "1";
    const ExperimentConfig cfg = ExperimentConfig::from_map(preset);
    for (const auto &row : run_figure("fig4", cfg, table)) {
        CHECK(row.n1_star == 0);
    }
}

TEST_CASE("reference single-antenna configuration decides to train") {
    KeyValueMap map;
    map["scenario"] = "miso_rician";
    map["system.M"] = "5";
    map["system.N"] = "1";
    map["system.T"] = "200";
    map["system.K_db"] = "3";
    map["system.sigma_r2_dbm"] = "-90";
    map["system.beta"] = "1e-6";
    map["system.Pf_watts"] = "1";
    map["system.eta"] = "0.5";
    const ExperimentConfig cfg = ExperimentConfig::from_map(map);
    LambdaTable table(1, 1000);
    const SolverReport report = dispatch_solve(cfg, table);
    CHECK(report.trained);
    CHECK(report.design.tau == 1);
    CHECK(report.design.n1 == 1);
}

TEST_CASE("benchmarked sweep keeps the expected ordering") {
    LambdaTable table = shared_table();
    KeyValueMap preset = figure_preset("fig6");
    preset["sweep.values"] = "200";
    preset["run.trials"] = "3000";
    const ExperimentConfig cfg = ExperimentConfig::from_map(preset);
    const auto rows = run_figure("fig6", cfg, table);
    REQUIRE(rows.size() == 1);
    const ResultRow &row = rows.front();
    REQUIRE(row.mc_net_joules.has_value());
    REQUIRE(row.benchmark_ideal.has_value());
    REQUIRE(row.benchmark_isotropic.has_value());
    CHECK(!row.benchmark_los.has_value()); // meaningless without a Rician part
    // Trained transfer beats blind transmission and cannot beat perfect CSI.
    CHECK(*row.mc_net_joules > *row.benchmark_isotropic);
    CHECK(*row.mc_net_joules < *row.benchmark_ideal);
}

TEST_CASE("figure presets cover the documented set") {
    for (const auto &name : figure_names()) {
        CHECK_NOTHROW(figure_preset(name));
    }
    CHECK_THROWS_AS(figure_preset("fig2"), ConfigError);
}

TEST_CASE("cli exit codes") {
    SUBCASE("help exits zero") { CHECK(run_cli("--help") == 0); }

    SUBCASE("successful solve exits zero") {
        CHECK(run_cli("solve --set scenario=miso_rician --set system.M=5 --set system.N=1 "
                      "--set system.T=200 --set system.K_db=3") == 0);
    }

    SUBCASE("simulate runs end to end") {
        CHECK(run_cli("simulate --set scenario=rayleigh --set system.M=2 --set system.N=2 "
                      "--set system.T=12 --trials 200 --set output.benchmarks=false") == 0);
        CHECK(run_cli("simulate --set scenario=large_m --set system.M=8 --set system.N=2 "
                      "--set system.T=40 --set system.K=1 --trials 200") == 0);
    }

    SUBCASE("config errors exit two") {
        CHECK(run_cli("solve --set scenario=nonsense") == 2);
        CHECK(run_cli("solve --set scenario=miso_rician --set system.N=4") == 2);
        CHECK(run_cli("figure fig999") == 2);
        CHECK(run_cli("unknown-subcommand") == 2);
        CHECK(run_cli("simulate --set sweep.variable=T,M --set sweep.values=10,20") == 2);
        CHECK(run_cli("solve --config /nonexistent/config.ini") == 3);
    }

    SUBCASE("unwritable cache path exits three") {
        CHECK(run_cli("lambda-table --m 2:2 --n1 1:2 --trials 1000 "
                      "--out /nonexistent-dir/cache.csv") == 3);
    }
}

TEST_CASE("cli CSV output is re-readable") {
    const auto path = std::filesystem::temp_directory_path() / "wetsim_fig7.csv";
    const int code = run_cli("figure fig7 --out " + path.string());
    REQUIRE(code == 0);
    const auto [meta, rows] = read_result_csv(path);
    CHECK(meta.command == "figure fig7");
    CHECK(rows.size() == 15);
    for (const auto &row : rows) {
        CHECK(row.t_boundary.has_value());
    }
    std::filesystem::remove(path);
}

TEST_CASE("lambda-table command is idempotent for a fixed seed") {
    const auto path = std::filesystem::temp_directory_path() / "wetsim_lam_cli.csv";
    std::filesystem::remove(path);
    REQUIRE(run_cli("lambda-table --m 3:3 --n1 1:3 --trials 5000 --out " + path.string()) == 0);
    std::ifstream first(path);
    const std::string contents_a((std::istreambuf_iterator<char>(first)),
                                 std::istreambuf_iterator<char>());
    REQUIRE(run_cli("lambda-table --m 3:3 --n1 1:3 --trials 5000 --out " + path.string()) == 0);
    std::ifstream second(path);
    const std::string contents_b((std::istreambuf_iterator<char>(second)),
                                 std::istreambuf_iterator<char>());
    CHECK(contents_a == contents_b);
    CHECK(contents_a.find("M,N1,lambda,trials,halfwidth") != std::string::npos);
    std::filesystem::remove(path);
}
