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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wetsim/simkit.hpp"

namespace wetsim {

/// Flat "section.key" -> string map; the parsed form of the config file.
using KeyValueMap = std::map<std::string, std::string>;

/// Parses the INI-style config text: `[section]` headers, `key = value`
/// lines, `#`/`;` comments. Top-level keys (before any section) keep their
/// bare name.
KeyValueMap parse_config_text(const std::string &text);

KeyValueMap load_config_file(const std::filesystem::path &path);

/// Applies one `section.key=value` command-line override.
void apply_override(KeyValueMap &map, const std::string &assignment);

struct SweepSpec {
    std::string variable;
    std::vector<double> values;
};

/// Typed experiment description. dB-scale inputs are converted here; the
/// library below this layer is linear-scale only.
struct ExperimentConfig {
    // [system]
    int m = 1;
    int n = 1;
    int t = 100;
    double k = 0.0; ///< linear
    double beta = 1e-6;
    double pf_watts = 1.0;
    double eta = 0.5;
    double sigma_r2_watts = 1e-12;
    // [channel] deterministic-component geometry (rank-1 single path)
    double aoa_deg = 0.0;
    double aod_deg = 10.0;
    double spacing_wavelengths = 0.5;
    // top level
    std::string scenario = "rayleigh";
    // [run]
    long trials = 10000;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string lambda_cache_path;
    long lambda_trials = 400000;
    // [sweep]
    std::optional<SweepSpec> sweep;
    // [output]
    std::string csv_path;
    bool with_mc = true;
    bool with_benchmarks = true;

    static ExperimentConfig from_map(const KeyValueMap &map);

    void validate() const;
    SystemParams system_params() const;
    RicianSpec rician_spec() const;
};

/// Sets the swept parameter on a copy of the config (T, M, N, K, K_db, Pf,
/// eta, beta, sigma_r2_dbm or trials).
void apply_sweep_value(ExperimentConfig &cfg, const std::string &variable, double value);

/// One output record. Optional fields are written as empty CSV cells.
struct ResultRow {
    double sweep_value = 0.0;
    std::optional<int> n1_star;
    std::optional<int> tau_star;
    std::optional<double> pr_star_watts;
    std::optional<double> predicted_net_joules;
    std::optional<double> mc_net_joules;
    std::optional<double> mc_halfwidth;
    std::optional<double> benchmark_ideal;
    std::optional<double> benchmark_isotropic;
    std::optional<double> benchmark_los;
    std::optional<double> t_boundary; ///< training-region figures only
};

struct CsvMeta {
    std::string command;
    std::uint64_t seed = 0;
};

void write_result_csv(const std::filesystem::path &path, const CsvMeta &meta,
                      const std::vector<ResultRow> &rows);

std::pair<CsvMeta, std::vector<ResultRow>> read_result_csv(const std::filesystem::path &path);

/// Scenario dispatch to the matching closed-form solver.
SolverReport dispatch_solve(const ExperimentConfig &cfg, LambdaTable &table);

/// Solver + Monte Carlo validation + benchmark runs for one parameter point.
ResultRow evaluate_point(const ExperimentConfig &cfg, LambdaTable &table, double sweep_value);

/// Rows for the configured sweep (or the single configured point).
std::vector<ResultRow> run_simulate(const ExperimentConfig &cfg, LambdaTable &table);

/// Smallest block length at which training beats the no-training baseline
/// for a single-antenna receiver; empty when training never helps (m = 1).
std::optional<int> miso_training_threshold_t(const SystemParams &p);

/// Preset parameter map for a named figure (fig3..fig9).
KeyValueMap figure_preset(const std::string &name);

/// Figure names in preset order.
const std::vector<std::string> &figure_names();

/// Runs a named figure with the given (preset-merged) config.
std::vector<ResultRow> run_figure(const std::string &name, const ExperimentConfig &cfg,
                                  LambdaTable &table);

} // namespace wetsim
