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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wetsim/experiment.hpp"

namespace {

using namespace wetsim;

constexpr std::uint64_t kDefaultLambdaSeed = 20260811ULL;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::string out_path;
};

void add_common(CLI::App *cmd, CommonArgs &args) {
    cmd->add_option("--config", args.config_path, "Experiment config file");
    cmd->add_option("--set", args.overrides, "Override a config key, e.g. --set system.T=50")
        ->take_all();
    cmd->add_option("--seed", args.seed, "Master seed (overrides run.seed)");
    cmd->add_option("--trials", args.trials, "Monte Carlo trials (overrides run.trials)");
    cmd->add_option("--out", args.out_path, "Output CSV path (overrides output.csv_path)");
}

ExperimentConfig build_config(const CommonArgs &args, KeyValueMap base = {}) {
    if (!args.config_path.empty()) {
        for (const auto &[key, value] : load_config_file(args.config_path)) {
            base[key] = value;
        }
    }
    for (const auto &assignment : args.overrides) {
        apply_override(base, assignment);
    }
    ExperimentConfig cfg = ExperimentConfig::from_map(base);
    if (args.seed) {
        cfg.seed = *args.seed;
    }
    if (args.trials) {
        cfg.trials = *args.trials;
    }
    if (!args.out_path.empty()) {
        cfg.csv_path = args.out_path;
    }
    return cfg;
}

void load_table(const ExperimentConfig &cfg, LambdaTable &table) {
    std::filesystem::path cache = cfg.lambda_cache_path;
    if (cache.empty() && std::filesystem::exists("data/lambda_cache.csv")) {
        cache = "data/lambda_cache.csv";
    }
    if (!cache.empty()) {
        table.load_csv(cache);
    }
}

void save_table(const ExperimentConfig &cfg, const LambdaTable &table) {
    if (!cfg.lambda_cache_path.empty()) {
        table.save_csv(cfg.lambda_cache_path);
    }
}

void print_report(const SolverReport &report) {
    std::printf("regime:        %s\n", to_string(report.regime));
    std::printf("decision:      %s\n", report.trained ? "train" : "no training");
    std::printf("n1*:           %d\n", report.design.n1);
    std::printf("tau*:          %d\n", report.design.tau);
    std::printf("Pr* [W]:       %.6g\n", report.design.pr);
    if (report.design.n1 > 0) {
        std::string set;
        for (int idx : report.design.trained_set) {
            set += (set.empty() ? "" : ",") + std::to_string(idx);
        }
        std::printf("trained set:   {%s}\n", set.c_str());
    }
    std::printf("predicted net: %.6g J\n", report.predicted_net);
    if (report.mc_halfwidth > 0.0) {
        std::printf("95%% halfwidth: %.3g J\n", report.mc_halfwidth);
    }
}

void print_rows(const std::vector<ResultRow> &rows) {
    std::printf("%12s %8s %8s %12s %14s %14s %12s\n", "sweep", "n1*", "tau*", "Pr*[W]",
                "predicted[J]", "mc_net[J]", "mc_hw[J]");
    auto opt_str = [](const std::optional<double> &v) {
        if (!v) {
            return std::string("-");
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.5g", *v);
        return std::string(buf);
    };
    for (const auto &row : rows) {
        std::printf("%12g %8s %8s %12s %14s %14s %12s\n", row.sweep_value,
                    row.n1_star ? std::to_string(*row.n1_star).c_str() : "-",
                    row.tau_star ? std::to_string(*row.tau_star).c_str() : "-",
                    opt_str(row.pr_star_watts).c_str(),
                    opt_str(row.predicted_net_joules).c_str(),
                    opt_str(row.mc_net_joules).c_str(), opt_str(row.mc_halfwidth).c_str());
    }
}

void maybe_write_csv(const ExperimentConfig &cfg, const std::string &command,
                     const std::vector<ResultRow> &rows) {
    if (cfg.csv_path.empty()) {
        return;
    }
    write_result_csv(cfg.csv_path, {command, cfg.seed}, rows);
    std::printf("wrote %zu rows to %s\n", rows.size(), cfg.csv_path.c_str());
}

std::pair<int, int> parse_range(const std::string &text) {
    try {
        const auto colon = text.find(':');
        if (colon == std::string::npos) {
            const int v = std::stoi(text);
            return {v, v};
        }
        return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception &) {
        throw ConfigError("invalid range '" + text + "' (expected N or LO:HI)");
    }
}

int run(int argc, char **argv) {
    CLI::App app{"wetsim - training design and Monte Carlo validation for multi-antenna "
                 "wireless energy transfer"};
    app.require_subcommand(1);

    CommonArgs solve_args;
    auto *solve_cmd = app.add_subcommand("solve", "Closed-form training design for a scenario");
    add_common(solve_cmd, solve_args);

    CommonArgs sim_args;
    auto *sim_cmd =
        app.add_subcommand("simulate", "Solve, then validate by Monte Carlo (plus benchmarks)");
    add_common(sim_cmd, sim_args);

    CommonArgs fig_args;
    std::string figure_name;
    auto *fig_cmd = app.add_subcommand("figure", "Reproduce a study figure as plot-ready CSV");
    fig_cmd->add_option("name", figure_name, "One of fig3..fig9")->required();
    add_common(fig_cmd, fig_args);

    CommonArgs lam_args;
    std::string m_range = "1:5";
    std::string n1_range = "1:10";
    long lam_trials = 400000;
    auto *lam_cmd = app.add_subcommand("lambda-table",
                                       "Populate or extend the expected-peak-eigenvalue cache");
    lam_cmd->add_option("--m", m_range, "Transmit antenna range, e.g. 2:6 or 5");
    lam_cmd->add_option("--n1", n1_range, "Trained antenna range, e.g. 1:10 or 4");
    lam_cmd->add_option("--trials", lam_trials, "Monte Carlo trials per entry");
    lam_cmd->add_option("--config", lam_args.config_path, "Experiment config file");
    lam_cmd->add_option("--set", lam_args.overrides, "Override a config key")->take_all();
    lam_cmd->add_option("--out", lam_args.out_path, "Cache CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    if (solve_cmd->parsed()) {
        const ExperimentConfig cfg = build_config(solve_args);
        LambdaTable table(kDefaultLambdaSeed, cfg.lambda_trials);
        load_table(cfg, table);
        const SolverReport report = dispatch_solve(cfg, table);
        print_report(report);
        if (!cfg.csv_path.empty()) {
            ResultRow row;
            row.sweep_value = static_cast<double>(cfg.t);
            row.n1_star = report.design.n1;
            row.tau_star = report.design.tau;
            row.pr_star_watts = report.design.pr;
            row.predicted_net_joules = report.predicted_net;
            maybe_write_csv(cfg, "solve", {row});
        }
        save_table(cfg, table);
        return 0;
    }

    if (sim_cmd->parsed()) {
        const ExperimentConfig cfg = build_config(sim_args);
        LambdaTable table(kDefaultLambdaSeed, cfg.lambda_trials);
        load_table(cfg, table);
        const auto rows = run_simulate(cfg, table);
        print_rows(rows);
        maybe_write_csv(cfg, "simulate", rows);
        save_table(cfg, table);
        return 0;
    }

    if (fig_cmd->parsed()) {
        const ExperimentConfig cfg = build_config(fig_args, figure_preset(figure_name));
        LambdaTable table(kDefaultLambdaSeed, cfg.lambda_trials);
        load_table(cfg, table);
        const auto rows = run_figure(figure_name, cfg, table);
        print_rows(rows);
        maybe_write_csv(cfg, "figure " + figure_name, rows);
        save_table(cfg, table);
        return 0;
    }

    // lambda-table
    ExperimentConfig cfg = build_config(lam_args);
    const auto [m_lo, m_hi] = parse_range(m_range);
    const auto [n_lo, n_hi] = parse_range(n1_range);
    if (m_lo < 1 || n_lo < 1 || m_hi < m_lo || n_hi < n_lo) {
        throw ConfigError("lambda-table: invalid --m or --n1 range");
    }
    std::filesystem::path cache = "lambda_cache.csv";
    if (!lam_args.out_path.empty()) {
        cache = lam_args.out_path;
    } else if (!cfg.lambda_cache_path.empty()) {
        cache = cfg.lambda_cache_path;
    }
    LambdaTable table(kDefaultLambdaSeed, lam_trials);
    table.load_csv(cache);
    for (int m = m_lo; m <= m_hi; ++m) {
        for (int n1 = n_lo; n1 <= n_hi; ++n1) {
            table.ensure(m, n1, lam_trials);
            const LambdaEntry e = table.entry(m, n1);
            if (e.trials > 0 && e.trials < 1000) {
                std::fprintf(stderr, "warning: (%d,%d) estimated from only %ld trials\n", m, n1,
                             e.trials);
            }
            std::printf("Lambda(%d,%2d) = %.8f  (trials %ld, halfwidth %.2e)\n", m, n1, e.value,
                        e.trials, e.halfwidth);
        }
    }
    table.save_csv(cache);
    std::printf("cache written to %s\n", cache.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const wetsim::ConfigError &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const wetsim::ContractViolation &e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return 2;
    } catch (const wetsim::IoError &e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const wetsim::NumericError &e) {
        std::fprintf(stderr, "numeric failure: %s (residual %.3e)\n", e.what(), e.residual());
        return 4;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
