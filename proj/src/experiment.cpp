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

#include "wetsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace wetsim {

namespace {

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string &line) {
    const auto pos = line.find_first_of("#;");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_double(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception &) {
        throw ConfigError("config: " + key + " is not a number: '" + value + "'");
    }
}

long parse_long(const std::string &key, const std::string &value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception &) {
        throw ConfigError("config: " + key + " is not an integer: '" + value + "'");
    }
}

bool parse_bool(const std::string &key, const std::string &value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError("config: " + key + " is not a boolean: '" + value + "'");
}

std::vector<double> parse_value_list(const std::string &key, const std::string &value) {
    std::vector<double> out;
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        throw ConfigError("config: " + key + " must list at least one value");
    }
    return out;
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

KeyValueMap parse_config_text(const std::string &text) {
    KeyValueMap map;
    std::istringstream stream(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key = value at line " + std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config: empty key at line " + std::to_string(line_no));
        }
        const std::string full = section.empty() ? key : section + "." + key;
        map[full] = value;
    }
    return map;
}

KeyValueMap load_config_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("config: cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void apply_override(KeyValueMap &map, const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like section.key=value: '" + assignment + "'");
    }
    map[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

ExperimentConfig ExperimentConfig::from_map(const KeyValueMap &map) {
    ExperimentConfig cfg;
    bool have_k = false;
    bool have_k_db = false;
    bool have_noise_dbm = false;
    bool have_noise_watts = false;
    std::optional<std::string> sweep_variable;
    std::optional<std::vector<double>> sweep_values;

    for (const auto &[key, value] : map) {
        if (key == "scenario") {
            cfg.scenario = value;
        } else if (key == "system.M") {
            cfg.m = static_cast<int>(parse_long(key, value));
        } else if (key == "system.N") {
            cfg.n = static_cast<int>(parse_long(key, value));
        } else if (key == "system.T") {
            cfg.t = static_cast<int>(parse_long(key, value));
        } else if (key == "system.K") {
            cfg.k = parse_double(key, value);
            have_k = true;
        } else if (key == "system.K_db") {
            cfg.k = db_to_linear(parse_double(key, value));
            have_k_db = true;
        } else if (key == "system.beta") {
            cfg.beta = parse_double(key, value);
        } else if (key == "system.Pf_watts") {
            cfg.pf_watts = parse_double(key, value);
        } else if (key == "system.eta") {
            cfg.eta = parse_double(key, value);
        } else if (key == "system.sigma_r2_dbm") {
            cfg.sigma_r2_watts = dbm_to_watts(parse_double(key, value));
            have_noise_dbm = true;
        } else if (key == "system.sigma_r2_watts") {
            cfg.sigma_r2_watts = parse_double(key, value);
            have_noise_watts = true;
        } else if (key == "channel.aoa_deg") {
            cfg.aoa_deg = parse_double(key, value);
        } else if (key == "channel.aod_deg") {
            cfg.aod_deg = parse_double(key, value);
        } else if (key == "channel.spacing_wavelengths") {
            cfg.spacing_wavelengths = parse_double(key, value);
        } else if (key == "run.trials") {
            cfg.trials = parse_long(key, value);
        } else if (key == "run.seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
        } else if (key == "run.workers") {
            cfg.workers = static_cast<int>(parse_long(key, value));
        } else if (key == "run.lambda_cache_path") {
            cfg.lambda_cache_path = value;
        } else if (key == "run.lambda_trials") {
            cfg.lambda_trials = parse_long(key, value);
        } else if (key == "sweep.variable") {
            sweep_variable = value;
        } else if (key == "sweep.values") {
            sweep_values = parse_value_list(key, value);
        } else if (key == "output.csv_path") {
            cfg.csv_path = value;
        } else if (key == "output.mc") {
            cfg.with_mc = parse_bool(key, value);
        } else if (key == "output.benchmarks") {
            cfg.with_benchmarks = parse_bool(key, value);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }

    if (have_k && have_k_db) {
        throw ConfigError("config: set system.K or system.K_db, not both");
    }
    if (have_noise_dbm && have_noise_watts) {
        throw ConfigError("config: set system.sigma_r2_dbm or system.sigma_r2_watts, not both");
    }
    if (sweep_variable.has_value() != sweep_values.has_value()) {
        throw ConfigError("config: sweep needs both sweep.variable and sweep.values");
    }
    if (sweep_variable) {
        if (sweep_variable->find(',') != std::string::npos) {
            throw ConfigError("config: exactly one sweep variable is allowed");
        }
        cfg.sweep = SweepSpec{*sweep_variable, *sweep_values};
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    system_params().validate();
    if (scenario == "rayleigh") {
        if (k != 0.0) {
            throw ConfigError("scenario rayleigh requires K = 0");
        }
    } else if (scenario == "miso_rician") {
        if (n != 1) {
            throw ConfigError("scenario miso_rician requires N = 1");
        }
    } else if (scenario == "large_m") {
        if (m < n) {
            throw ConfigError("scenario large_m requires M >= N");
        }
    } else {
        throw ConfigError("unknown scenario '" + scenario + "'");
    }
    if (trials < 1) {
        throw ConfigError("run.trials must be >= 1");
    }
    if (lambda_trials < 1) {
        throw ConfigError("run.lambda_trials must be >= 1");
    }
    if (sweep) {
        // Validate the variable name eagerly so typos fail before a run.
        ExperimentConfig probe = *this;
        probe.sweep.reset();
        apply_sweep_value(probe, sweep->variable, sweep->values.front());
    }
}

SystemParams ExperimentConfig::system_params() const {
    SystemParams p;
    p.m = m;
    p.n = n;
    p.t = t;
    p.k = k;
    p.beta = beta;
    p.pf = pf_watts;
    p.eta = eta;
    p.sigma_r2 = sigma_r2_watts;
    return p;
}

RicianSpec ExperimentConfig::rician_spec() const {
    if (scenario == "rayleigh" || k == 0.0) {
        return RicianSpec::rayleigh(n, m, beta);
    }
    return RicianSpec::rank1(n, m, k, beta, deg_to_rad(aoa_deg), deg_to_rad(aod_deg),
                             spacing_wavelengths);
}

void apply_sweep_value(ExperimentConfig &cfg, const std::string &variable, double value) {
    if (variable == "T") {
        cfg.t = static_cast<int>(value);
    } else if (variable == "M") {
        cfg.m = static_cast<int>(value);
    } else if (variable == "N") {
        cfg.n = static_cast<int>(value);
    } else if (variable == "K") {
        cfg.k = value;
    } else if (variable == "K_db") {
        cfg.k = db_to_linear(value);
    } else if (variable == "Pf") {
        cfg.pf_watts = value;
    } else if (variable == "eta") {
        cfg.eta = value;
    } else if (variable == "beta") {
        cfg.beta = value;
    } else if (variable == "sigma_r2_dbm") {
        cfg.sigma_r2_watts = dbm_to_watts(value);
    } else if (variable == "trials") {
        cfg.trials = static_cast<long>(value);
    } else {
        throw ConfigError("unknown sweep variable '" + variable + "'");
    }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

constexpr const char *kCsvHeader =
    "sweep_value,n1_star,tau_star,pr_star_watts,predicted_net_joules,mc_net_joules,"
    "mc_halfwidth,benchmark_ideal,benchmark_isotropic,benchmark_los,t_boundary";

std::string cell(const std::optional<double> &v) { return v ? format_double(*v) : std::string(); }

std::string cell(const std::optional<int> &v) { return v ? std::to_string(*v) : std::string(); }

std::optional<double> parse_optional_double(const std::string &field) {
    if (field.empty()) {
        return std::nullopt;
    }
    return std::stod(field);
}

std::optional<int> parse_optional_int(const std::string &field) {
    if (field.empty()) {
        return std::nullopt;
    }
    return std::stoi(field);
}

} // namespace

void write_result_csv(const std::filesystem::path &path, const CsvMeta &meta,
                      const std::vector<ResultRow> &rows) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open CSV for writing: " + path.string());
    }
    out << "# wetsim v" << kVersion << "\n";
    out << "# command=" << meta.command << "\n";
    out << "# seed=" << meta.seed << "\n";
    out << kCsvHeader << "\n";
    for (const auto &row : rows) {
        out << format_double(row.sweep_value) << ',' << cell(row.n1_star) << ','
            << cell(row.tau_star) << ',' << cell(row.pr_star_watts) << ','
            << cell(row.predicted_net_joules) << ',' << cell(row.mc_net_joules) << ','
            << cell(row.mc_halfwidth) << ',' << cell(row.benchmark_ideal) << ','
            << cell(row.benchmark_isotropic) << ',' << cell(row.benchmark_los) << ','
            << cell(row.t_boundary) << "\n";
    }
    if (!out) {
        throw IoError("failed while writing CSV: " + path.string());
    }
}

std::pair<CsvMeta, std::vector<ResultRow>> read_result_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open CSV: " + path.string());
    }
    CsvMeta meta;
    std::vector<ResultRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const auto body = line.substr(1);
            const auto eq = body.find('=');
            if (eq != std::string::npos) {
                const std::string key = trim(body.substr(0, eq));
                const std::string value = trim(body.substr(eq + 1));
                if (key == "command") {
                    meta.command = value;
                } else if (key == "seed") {
                    meta.seed = static_cast<std::uint64_t>(std::stoull(value));
                }
            }
            continue;
        }
        if (!header_seen) {
            if (trim(line) != kCsvHeader) {
                throw IoError("unexpected CSV header in " + path.string());
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        fields.resize(11);
        try {
            ResultRow row;
            row.sweep_value = std::stod(fields[0]);
            row.n1_star = parse_optional_int(fields[1]);
            row.tau_star = parse_optional_int(fields[2]);
            row.pr_star_watts = parse_optional_double(fields[3]);
            row.predicted_net_joules = parse_optional_double(fields[4]);
            row.mc_net_joules = parse_optional_double(fields[5]);
            row.mc_halfwidth = parse_optional_double(fields[6]);
            row.benchmark_ideal = parse_optional_double(fields[7]);
            row.benchmark_isotropic = parse_optional_double(fields[8]);
            row.benchmark_los = parse_optional_double(fields[9]);
            row.t_boundary = parse_optional_double(fields[10]);
            rows.push_back(row);
        } catch (const std::exception &) {
            throw IoError("malformed CSV row in " + path.string() + ": " + line);
        }
    }
    if (!header_seen) {
        throw IoError("CSV missing header: " + path.string());
    }
    return {meta, rows};
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

SolverReport dispatch_solve(const ExperimentConfig &cfg, LambdaTable &table) {
    cfg.validate();
    const SystemParams p = cfg.system_params();
    if (cfg.scenario == "rayleigh") {
        return solve_rayleigh(p, table);
    }
    if (cfg.scenario == "miso_rician") {
        return solve_miso_rician(p);
    }
    return solve_large_m(p, cfg.rician_spec().hbar);
}

namespace {

TrialStats run_target(const ExperimentConfig &cfg,
                      const std::variant<TrainingDesign, BenchmarkScheme> &target) {
    TrialPlan plan;
    plan.params = cfg.system_params();
    plan.spec = cfg.rician_spec();
    plan.target = target;
    plan.trials = cfg.trials;
    plan.master_seed = cfg.seed;
    plan.workers = cfg.workers;
    return run_plan(plan);
}

} // namespace

ResultRow evaluate_point(const ExperimentConfig &cfg, LambdaTable &table, double sweep_value) {
    const SolverReport report = dispatch_solve(cfg, table);
    ResultRow row;
    row.sweep_value = sweep_value;
    row.n1_star = report.design.n1;
    row.tau_star = report.design.tau;
    row.pr_star_watts = report.design.pr;
    row.predicted_net_joules = report.predicted_net;
    if (cfg.with_mc) {
        const TrialStats stats = run_target(cfg, report.design);
        row.mc_net_joules = stats.mean_net;
        row.mc_halfwidth = stats.halfwidth95;
    }
    if (cfg.with_benchmarks) {
        row.benchmark_ideal = run_target(cfg, BenchmarkScheme::ideal).mean_net;
        row.benchmark_isotropic = run_target(cfg, BenchmarkScheme::isotropic).mean_net;
        if (cfg.k > 0.0) {
            row.benchmark_los = run_target(cfg, BenchmarkScheme::los).mean_net;
        }
    }
    return row;
}

std::vector<ResultRow> run_simulate(const ExperimentConfig &cfg, LambdaTable &table) {
    cfg.validate();
    std::vector<ResultRow> rows;
    if (!cfg.sweep) {
        rows.push_back(evaluate_point(cfg, table, static_cast<double>(cfg.t)));
        return rows;
    }
    for (double value : cfg.sweep->values) {
        ExperimentConfig point = cfg;
        point.sweep.reset();
        apply_sweep_value(point, cfg.sweep->variable, value);
        point.validate();
        rows.push_back(evaluate_point(point, table, value));
    }
    return rows;
}

std::optional<int> miso_training_threshold_t(const SystemParams &p) {
    if (p.m < 2) {
        return std::nullopt; // single transmit antenna: no beamforming gain
    }
    const double gamma = esnr(p);
    const double rhs = std::sqrt(p.k * p.m + 1.0) + (p.k + 1.0) / std::sqrt(gamma);
    const double bound = 1.0 + rhs * rhs / static_cast<double>(p.m - 1);
    return static_cast<int>(std::floor(bound)) + 1;
}

// ---------------------------------------------------------------------------
// Figures
// ---------------------------------------------------------------------------

const std::vector<std::string> &figure_names() {
    static const std::vector<std::string> names = {"fig3", "fig4", "fig5", "fig6",
                                                   "fig7", "fig8", "fig9"};
    return names;
}

KeyValueMap figure_preset(const std::string &name) {
    KeyValueMap map;
    map["run.trials"] = "10000";
    map["run.seed"] = "1";
    map["system.beta"] = "1e-6";
    map["system.Pf_watts"] = "1";
    map["system.eta"] = "0.5";
    map["system.sigma_r2_dbm"] = "-90";
    if (name == "fig3") {
        // Net energy against the number of trained antennas, Rayleigh.
        map["scenario"] = "rayleigh";
        map["system.M"] = "5";
        map["system.N"] = "10";
        map["system.T"] = "50";
        map["output.benchmarks"] = "false";
    } else if (name == "fig4" || name == "fig5") {
        // Optimal antenna count (fig4) / training energy (fig5) versus T.
        map["scenario"] = "rayleigh";
        map["system.M"] = "5";
        map["system.N"] = "10";
        map["system.T"] = "100";
        map["sweep.variable"] = "T";
        std::string values;
        for (int t = 10; t <= 300; t += 10) {
            values += (values.empty() ? "" : ",") + std::to_string(t);
        }
        map["sweep.values"] = values;
        map["output.mc"] = "false";
        map["output.benchmarks"] = "false";
    } else if (name == "fig6") {
        // Net energy versus T with ideal and isotropic benchmarks.
        map["scenario"] = "rayleigh";
        map["system.M"] = "5";
        map["system.N"] = "5";
        map["system.T"] = "100";
        map["sweep.variable"] = "T";
        map["sweep.values"] = "20,40,60,80,100,120,140,160,180,200";
    } else if (name == "fig7") {
        // Training / no-training regions on the M-versus-T plane.
        map["scenario"] = "miso_rician";
        map["system.M"] = "5";
        map["system.N"] = "1";
        map["system.T"] = "200";
        map["system.K_db"] = "3";
        map["sweep.variable"] = "M";
        map["sweep.values"] = "2,3,4,5,6,7,8,10,12,16,20,25,30,40,50";
        map["output.mc"] = "false";
        map["output.benchmarks"] = "false";
    } else if (name == "fig8") {
        // Net energy versus the number of transmit antennas, Rician.
        map["scenario"] = "large_m";
        map["system.N"] = "5";
        map["system.M"] = "200";
        map["system.T"] = "1000";
        map["system.K"] = "1";
        map["sweep.variable"] = "M";
        map["sweep.values"] = "5,10,20,40,60,100,150,200,250,300";
        map["run.trials"] = "2000";
    } else if (name == "fig9") {
        // Net energy versus the Rician factor, single-antenna receiver.
        map["scenario"] = "miso_rician";
        map["system.M"] = "5";
        map["system.N"] = "1";
        map["system.T"] = "200";
        map["system.K_db"] = "0";
        map["sweep.variable"] = "K_db";
        map["sweep.values"] = "-10,-6,-3,0,3,6,9,12,15,18,21,24";
    } else {
        throw ConfigError("unknown figure '" + name + "'");
    }
    return map;
}

std::vector<ResultRow> run_figure(const std::string &name, const ExperimentConfig &cfg,
                                  LambdaTable &table) {
    cfg.validate();
    if (name == "fig3") {
        // Candidate designs over the trained-antenna count at fixed T.
        const SystemParams p = cfg.system_params();
        std::vector<ResultRow> rows;
        for (int n1 = 0; n1 <= p.n; ++n1) {
            ResultRow row;
            row.sweep_value = n1;
            row.n1_star = n1;
            row.tau_star = n1;
            const double lambda = n1 > 0 ? table.value(p.m, n1) : 0.0;
            const double pr = n1 > 0 ? rayleigh_opt_power(p, n1, lambda) : 0.0;
            row.pr_star_watts = pr;
            row.predicted_net_joules = rayleigh_net_value(p, n1, lambda);
            if (cfg.with_mc) {
                TrainingDesign design =
                    n1 > 0 ? TrainingDesign::leading(n1, n1, pr) : TrainingDesign::no_training();
                const TrialStats stats = run_target(cfg, design);
                row.mc_net_joules = stats.mean_net;
                row.mc_halfwidth = stats.halfwidth95;
            }
            rows.push_back(row);
        }
        return rows;
    }
    if (name == "fig7") {
        if (!cfg.sweep || cfg.sweep->variable != "M") {
            throw ConfigError("fig7 expects a sweep over M");
        }
        std::vector<ResultRow> rows;
        for (double value : cfg.sweep->values) {
            ExperimentConfig point = cfg;
            point.sweep.reset();
            apply_sweep_value(point, "M", value);
            point.validate();
            const SystemParams p = point.system_params();
            ResultRow row;
            row.sweep_value = value;
            if (const auto threshold = miso_training_threshold_t(p)) {
                row.t_boundary = static_cast<double>(*threshold);
                SystemParams at = p;
                at.t = *threshold;
                row.n1_star = 1;
                row.tau_star = 1;
                row.pr_star_watts = miso_opt_power(at);
                row.predicted_net_joules = miso_net_value(at, 1);
            }
            rows.push_back(row);
        }
        return rows;
    }
    // Remaining figures are plain sweeps of the configured scenario.
    return run_simulate(cfg, table);
}

} // namespace wetsim
