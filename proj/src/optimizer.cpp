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

#include "wetsim/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "chunked_mc.hpp"
#include "wetsim/simkit.hpp"

namespace wetsim {

namespace {

constexpr long kLambdaChunk = 8192;

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

std::uint64_t entry_seed(std::uint64_t table_seed, int m, int n1) {
    const std::uint64_t key = (static_cast<std::uint64_t>(m) << 32) |
                              static_cast<std::uint64_t>(n1);
    return splitmix64(table_seed + (key + 1) * 0x9E3779B97F4A7C15ULL);
}

} // namespace

// ---------------------------------------------------------------------------
// TrainingDesign
// ---------------------------------------------------------------------------

TrainingDesign TrainingDesign::leading(int n1, int tau, double pr) {
    TrainingDesign d;
    d.n1 = n1;
    d.trained_set.resize(n1);
    std::iota(d.trained_set.begin(), d.trained_set.end(), 0);
    d.tau = tau;
    d.pr = pr;
    return d;
}

void TrainingDesign::validate(int n, int t) const {
    if (n1 != static_cast<int>(trained_set.size())) {
        throw ContractViolation("TrainingDesign: n1 must equal trained_set size");
    }
    validate_trained_set(trained_set, n);
    if (!std::isfinite(pr) || pr < 0.0) {
        throw ContractViolation("TrainingDesign: pr must be finite and >= 0");
    }
    if (n1 == 0) {
        if (tau != 0 || pr != 0.0) {
            throw ContractViolation("TrainingDesign: a no-training design has tau = 0, pr = 0");
        }
        return;
    }
    if (tau < n1 || tau > t) {
        throw ContractViolation("TrainingDesign: tau must lie in [n1, t]");
    }
}

const char *to_string(SolverRegime regime) {
    switch (regime) {
    case SolverRegime::rayleigh: return "rayleigh";
    case SolverRegime::miso_rician: return "miso_rician";
    case SolverRegime::large_m: return "large_m";
    case SolverRegime::brute_force: return "brute_force";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Expected peak eigenvalue of Gaussian Gram matrices
// ---------------------------------------------------------------------------

std::optional<double> wishart_max_eig_mean_exact(int m, int n1) {
    if (m < 1 || n1 < 1) {
        throw ContractViolation("wishart mean: dimensions must be >= 1");
    }
    const int s = std::min(m, n1);
    const int t = std::max(m, n1);
    if (s == 1) {
        return static_cast<double>(t);
    }
    if (s != 2) {
        return std::nullopt;
    }
    // Two nonzero eigenvalues with joint density proportional to
    // (l1 - l2)^2 (l1 l2)^(t-2) exp(-l1 - l2). Substituting u = l1 - l2,
    // v = l2 and expanding (u + v)^(t-1) gives a finite series for E[l1];
    // each term is evaluated in log space to keep large t stable.
    double total = 0.0;
    const double log_norm = std::lgamma(t) + std::lgamma(t - 1.0);
    for (int j = 0; j <= t - 1; ++j) {
        const double log_term = std::lgamma(t) - std::lgamma(j + 1.0) -
                                std::lgamma(t - j + 0.0) + std::lgamma(j + 3.0) +
                                std::lgamma(2.0 * t - 2.0 - j) -
                                (2.0 * t - 2.0 - j) * std::log(2.0) - log_norm;
        total += std::exp(log_term);
    }
    return total;
}

LambdaEntry wishart_max_eig_mean_mc(int m, int n1, long trials, std::uint64_t seed,
                                    int workers) {
    if (m < 1 || n1 < 1) {
        throw ContractViolation("wishart mean: dimensions must be >= 1");
    }
    if (trials < 1) {
        throw ContractViolation("wishart mean: trials must be >= 1");
    }
    const int small = std::min(m, n1);

    auto sums = detail::chunked_mc<1>(
        trials, seed, workers, kLambdaChunk,
        [&](long, std::mt19937_64 &rng, std::array<double, 1> &values) {
            const CMatrix g = sample_cscg(n1, m, 1.0, rng);
            CMatrix gram;
            if (n1 <= m) {
                gram = g * g.adjoint();
            } else {
                gram = g.adjoint() * g;
            }
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
            values[0] = solver.eigenvalues()(small - 1);
        });

    LambdaEntry entry;
    entry.trials = trials;
    entry.value = sums.sum[0] / static_cast<double>(trials);
    if (trials > 1) {
        const double var = positive_part(sums.sum_sq[0] / trials - entry.value * entry.value) *
                           trials / (trials - 1.0);
        entry.halfwidth = 1.96 * std::sqrt(var / static_cast<double>(trials));
    }
    return entry;
}

double lambda_mn(int m, int n1, long trials, std::uint64_t seed) {
    if (const auto exact = wishart_max_eig_mean_exact(m, n1)) {
        return *exact;
    }
    return wishart_max_eig_mean_mc(m, n1, trials, seed).value;
}

LambdaTable::LambdaTable(std::uint64_t seed, long default_trials)
    : seed_(seed), default_trials_(default_trials), mutex_(std::make_unique<std::mutex>()) {}

double LambdaTable::value(int m, int n1) { return entry(m, n1).value; }

LambdaEntry LambdaTable::entry(int m, int n1) {
    if (const auto exact = wishart_max_eig_mean_exact(m, n1)) {
        std::lock_guard lock(*mutex_);
        auto &slot = entries_[{m, n1}];
        slot = LambdaEntry{*exact, 0, 0.0};
        return slot;
    }
    {
        std::lock_guard lock(*mutex_);
        auto it = entries_.find({m, n1});
        if (it != entries_.end()) {
            return it->second;
        }
    }
    const LambdaEntry computed = compute(m, n1, default_trials_);
    std::lock_guard lock(*mutex_);
    auto [it, inserted] = entries_.try_emplace({m, n1}, computed);
    if (!inserted && it->second.trials < computed.trials) {
        it->second = computed;
    }
    return it->second;
}

void LambdaTable::ensure(int m, int n1, long trials) {
    if (wishart_max_eig_mean_exact(m, n1)) {
        entry(m, n1); // pins the analytic value into the table
        return;
    }
    {
        std::lock_guard lock(*mutex_);
        auto it = entries_.find({m, n1});
        if (it != entries_.end() && it->second.trials >= trials) {
            return;
        }
    }
    const LambdaEntry computed = compute(m, n1, trials);
    std::lock_guard lock(*mutex_);
    auto [it, inserted] = entries_.try_emplace({m, n1}, computed);
    if (!inserted && it->second.trials < computed.trials) {
        it->second = computed;
    }
}

LambdaEntry LambdaTable::compute(int m, int n1, long trials) const {
    return wishart_max_eig_mean_mc(m, n1, trials, entry_seed(seed_, m, n1));
}

void LambdaTable::load_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        return; // cold cache
    }
    std::string line;
    std::lock_guard lock(*mutex_);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (line.rfind("M,", 0) == 0) {
            continue; // header row
        }
        std::istringstream ss(line);
        std::string field;
        LambdaEntry e;
        int m = 0;
        int n1 = 0;
        try {
            std::getline(ss, field, ',');
            m = std::stoi(field);
            std::getline(ss, field, ',');
            n1 = std::stoi(field);
            std::getline(ss, field, ',');
            e.value = std::stod(field);
            std::getline(ss, field, ',');
            e.trials = std::stol(field);
            std::getline(ss, field, ',');
            e.halfwidth = std::stod(field);
        } catch (const std::exception &) {
            throw IoError("lambda cache: malformed line: " + line);
        }
        if (m < 1 || n1 < 1) {
            throw IoError("lambda cache: invalid dimensions in line: " + line);
        }
        if (const auto exact = wishart_max_eig_mean_exact(m, n1)) {
            entries_[{m, n1}] = LambdaEntry{*exact, 0, 0.0}; // pinned, never trusted from file
            continue;
        }
        auto [it, inserted] = entries_.try_emplace({m, n1}, e);
        if (!inserted && it->second.trials < e.trials) {
            it->second = e;
        }
    }
}

void LambdaTable::save_csv(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("lambda cache: cannot open for writing: " + path.string());
    }
    out << "# wetsim lambda cache v1\n";
    out << "# seed=" << seed_ << "\n";
    out << "M,N1,lambda,trials,halfwidth\n";
    std::lock_guard lock(*mutex_);
    char buf[128];
    for (const auto &[key, e] : entries_) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%ld,%.17g\n", key.first, key.second, e.value,
                      e.trials, e.halfwidth);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// Closed-form net-energy expressions
// ---------------------------------------------------------------------------

double rayleigh_net_energy(const SystemParams &p, int n1, int tau, double pr, double lambda) {
    if (n1 == 0) {
        return p.eta * static_cast<double>(p.t - tau) * p.pf * p.beta * p.n - pr * tau;
    }
    const double energy = pr * static_cast<double>(tau);
    const double num = energy * p.beta * lambda + p.sigma_r2 * static_cast<double>(n1) * n1;
    const double den = energy * p.beta + p.sigma_r2 * static_cast<double>(n1);
    const double trained_term = den > 0.0 ? num / den : static_cast<double>(n1);
    return p.eta * static_cast<double>(p.t - tau) * p.pf * p.beta *
               (trained_term + static_cast<double>(p.n - n1)) -
           energy;
}

double rayleigh_opt_power(const SystemParams &p, int n1, double lambda) {
    if (n1 < 1) {
        return 0.0;
    }
    const double gamma = esnr(p);
    const double gain = (p.t - n1) * (lambda / n1 - 1.0);
    return std::sqrt(p.eta * p.pf * p.sigma_r2) *
           positive_part(std::sqrt(positive_part(gain)) - 1.0 / std::sqrt(gamma));
}

bool rayleigh_training_profitable(const SystemParams &p, int n1, double lambda) {
    if (n1 < 1 || n1 > p.t) {
        return false;
    }
    return (p.t - n1) * (lambda / n1 - 1.0) > 1.0 / esnr(p);
}

double rayleigh_net_value(const SystemParams &p, int n1, double lambda) {
    if (n1 == 0) {
        return p.eta * p.t * p.pf * p.beta * p.n;
    }
    const double base = (p.t - n1) * p.eta * p.pf * p.beta * p.n;
    if (!rayleigh_training_profitable(p, n1, lambda)) {
        return base;
    }
    const double gamma = esnr(p);
    const double root = std::sqrt((p.t - n1) * (lambda / n1 - 1.0)) - 1.0 / std::sqrt(gamma);
    return base + p.eta * p.pf * p.beta * n1 * root * root;
}

double miso_net_energy(const SystemParams &p, int n1, int tau, double pr) {
    if (n1 != 0 && n1 != 1) {
        throw ContractViolation("miso_net_energy: n1 must be 0 or 1");
    }
    const double kp1 = p.k + 1.0;
    const double lead = p.eta * static_cast<double>(p.t - tau) * p.pf * p.beta;
    if (n1 == 0) {
        return lead * (p.k * p.m + 1.0) / kp1 - pr * tau;
    }
    const double energy = pr * static_cast<double>(tau);
    const double num = p.m * p.beta * energy / kp1 + p.sigma_r2;
    const double den = p.beta * energy + p.sigma_r2 * kp1;
    // Degenerate zero-energy, zero-noise corner: fall back to the
    // no-information limit.
    const double trained_term = den > 0.0 ? num / den : 1.0 / kp1;
    return lead * (p.k * p.m / kp1 + trained_term) - energy;
}

double miso_opt_power(const SystemParams &p) {
    const double gamma = esnr(p);
    return std::sqrt(p.eta * p.pf * p.sigma_r2) *
           positive_part(std::sqrt(static_cast<double>(p.t - 1) * (p.m - 1)) -
                         (p.k + 1.0) / std::sqrt(gamma));
}

bool miso_should_train(const SystemParams &p) {
    const double gamma = esnr(p);
    const double lhs = static_cast<double>(p.t - 1) * (p.m - 1);
    const double rhs = std::sqrt(p.k * p.m + 1.0) + (p.k + 1.0) / std::sqrt(gamma);
    return lhs > rhs * rhs;
}

double miso_net_value(const SystemParams &p, int n1) {
    const double kp1 = p.k + 1.0;
    if (n1 == 0) {
        return p.eta * p.t * p.pf * p.beta * (p.k * p.m + 1.0) / kp1;
    }
    const double base = (p.t - 1) * p.eta * p.pf * p.beta * (p.k * p.m + 1.0) / kp1;
    const double gamma = esnr(p);
    const double lhs = static_cast<double>(p.t - 1) * (p.m - 1);
    if (!(lhs > kp1 * kp1 / gamma)) {
        return base;
    }
    const double root = std::sqrt(lhs) - kp1 / std::sqrt(gamma);
    return base + p.eta * p.pf * p.beta / kp1 * root * root;
}

double large_m_net_energy(const SystemParams &p, double lambda_bar, double w, int n1, int tau,
                          double pr) {
    const double kp1 = p.k + 1.0;
    const double lead = p.eta * static_cast<double>(p.t - tau) * p.pf * p.beta / kp1;
    if (n1 == 0) {
        return lead * (p.k * lambda_bar + p.n) - pr * tau;
    }
    const double energy = pr * static_cast<double>(tau);
    const double num = p.m * w * p.beta * energy + static_cast<double>(n1) * n1 * p.sigma_r2 * kp1;
    const double den = p.beta * energy + static_cast<double>(n1) * p.sigma_r2 * kp1;
    const double trained_term = den > 0.0 ? num / den : static_cast<double>(n1);
    return lead * (p.k * lambda_bar + trained_term + static_cast<double>(p.n - n1)) - energy;
}

double large_m_opt_power(const SystemParams &p, double w, int n1) {
    if (n1 < 1) {
        return 0.0;
    }
    const double gamma = esnr(p);
    const double gain = (p.t - n1) * (p.m * w / n1 - 1.0);
    return std::sqrt(p.eta * p.pf * p.sigma_r2) *
           positive_part(std::sqrt(positive_part(gain)) - (p.k + 1.0) / std::sqrt(gamma));
}

double large_m_net_value(const SystemParams &p, double lambda_bar, double w, int n1) {
    const double kp1 = p.k + 1.0;
    if (n1 == 0) {
        return p.eta * p.t * p.pf * p.beta * (p.k * lambda_bar + p.n) / kp1;
    }
    const double base = (p.t - n1) * p.eta * p.pf * p.beta * (p.k * lambda_bar + p.n) / kp1;
    const double gamma = esnr(p);
    const double gain = (p.t - n1) * (p.m * w / n1 - 1.0);
    if (!(gain > kp1 * kp1 / gamma)) {
        return base;
    }
    const double root = std::sqrt(gain) - kp1 / std::sqrt(gamma);
    return base + p.eta * p.pf * p.beta * n1 / kp1 * root * root;
}

double rank1_reduced_objective(const SystemParams &p, double n1) {
    return (static_cast<double>(p.t) - n1) * (p.k * p.n + n1 / static_cast<double>(p.n));
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

SolverReport solve_rayleigh(const SystemParams &p, LambdaTable &table) {
    p.validate();
    if (p.k != 0.0) {
        throw ContractViolation("solve_rayleigh: requires k == 0 (Rayleigh fading)");
    }
    SolverReport report;
    report.regime = SolverRegime::rayleigh;
    report.design = TrainingDesign::no_training();
    report.predicted_net = rayleigh_net_value(p, 0, 0.0);

    // All receive antennas are statistically equivalent here, so only the
    // count matters; candidates outside the profitable set never beat the
    // no-training baseline.
    for (int n1 = 1; n1 <= std::min(p.n, p.t); ++n1) {
        const double lambda = table.value(p.m, n1);
        if (!rayleigh_training_profitable(p, n1, lambda)) {
            continue;
        }
        const double value = rayleigh_net_value(p, n1, lambda);
        if (value > report.predicted_net) {
            report.predicted_net = value;
            report.design = TrainingDesign::leading(n1, n1, rayleigh_opt_power(p, n1, lambda));
        }
    }
    report.trained = report.design.n1 > 0;
    return report;
}

SolverReport solve_miso_rician(const SystemParams &p) {
    p.validate();
    if (p.n != 1) {
        throw ContractViolation("solve_miso_rician: requires n == 1");
    }
    SolverReport report;
    report.regime = SolverRegime::miso_rician;
    if (miso_should_train(p)) {
        report.design = TrainingDesign::leading(1, 1, miso_opt_power(p));
        report.predicted_net = miso_net_value(p, 1);
        report.trained = true;
    } else {
        report.design = TrainingDesign::no_training();
        report.predicted_net = miso_net_value(p, 0);
        report.trained = false;
    }
    return report;
}

SolverReport solve_large_m(const SystemParams &p, const CMatrix &hbar) {
    p.validate();
    if (p.m < p.n) {
        throw ContractViolation("solve_large_m: requires m >= n");
    }
    if (hbar.rows() != p.n || hbar.cols() != p.m) {
        throw ContractViolation("solve_large_m: hbar must be n x m");
    }

    const EigPair dom = hermitian_max_eig(hbar * hbar.adjoint());
    const double lambda_bar = dom.value;

    // Train the antennas where the deterministic component is strongest:
    // order by dominant-eigenvector magnitude, non-increasing.
    std::vector<int> order(p.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(dom.vector(a)) > std::abs(dom.vector(b));
    });
    std::vector<double> cum_weight(p.n + 1, 0.0);
    for (int i = 0; i < p.n; ++i) {
        cum_weight[i + 1] = cum_weight[i] + std::norm(dom.vector(order[i]));
    }

    SolverReport report;
    report.regime = SolverRegime::large_m;
    report.design = TrainingDesign::no_training();
    report.predicted_net = large_m_net_value(p, lambda_bar, 0.0, 0);

    for (int n1 = 1; n1 <= std::min(p.n, p.t); ++n1) {
        const double w = cum_weight[n1];
        const double value = large_m_net_value(p, lambda_bar, w, n1);
        if (value > report.predicted_net) {
            report.predicted_net = value;
            TrainingDesign d;
            d.n1 = n1;
            d.trained_set.assign(order.begin(), order.begin() + n1);
            std::sort(d.trained_set.begin(), d.trained_set.end());
            d.tau = n1;
            d.pr = large_m_opt_power(p, w, n1);
            report.design = std::move(d);
        }
    }
    report.trained = report.design.n1 > 0;
    return report;
}

int closed_form_n1_rank1(const SystemParams &p) {
    p.validate();
    const double unclamped = (static_cast<double>(p.t) - p.k * p.n * p.n) / 2.0;
    if (unclamped <= 0.0) {
        return 0;
    }
    if (unclamped >= static_cast<double>(p.n)) {
        return p.n;
    }
    const double lo = std::floor(unclamped);
    const double hi = std::ceil(unclamped);
    if (lo == hi) {
        return static_cast<int>(lo);
    }
    // Non-integer interior optimum: keep whichever neighbor scores better
    // on the reduced objective (smaller count on ties).
    return rank1_reduced_objective(p, lo) >= rank1_reduced_objective(p, hi)
               ? static_cast<int>(lo)
               : static_cast<int>(hi);
}

// ---------------------------------------------------------------------------
// Exhaustive Monte Carlo oracle
// ---------------------------------------------------------------------------

std::vector<EvaluatedDesign> brute_force_table(const SystemParams &p, const RicianSpec &spec,
                                               const BruteForceGrid &grid, long trials,
                                               std::uint64_t master_seed, int workers) {
    p.validate();
    spec.validate();
    if (p.n > 12) {
        throw ContractViolation("brute_force: subset enumeration guarded to n <= 12");
    }
    if (grid.taus.empty() || grid.powers.empty()) {
        throw ContractViolation("brute_force: grid must be nonempty");
    }

    std::vector<TrainingDesign> designs;
    designs.push_back(TrainingDesign::no_training());
    const unsigned subsets = 1u << p.n;
    for (unsigned mask = 1; mask < subsets; ++mask) {
        TrainingDesign base;
        for (int bit = 0; bit < p.n; ++bit) {
            if (mask & (1u << bit)) {
                base.trained_set.push_back(bit);
            }
        }
        base.n1 = static_cast<int>(base.trained_set.size());
        for (int tau : grid.taus) {
            if (tau < base.n1 || tau > p.t) {
                continue;
            }
            for (double pr : grid.powers) {
                if (pr < 0.0) {
                    throw ContractViolation("brute_force: negative training power in grid");
                }
                TrainingDesign d = base;
                d.tau = tau;
                d.pr = pr;
                designs.push_back(std::move(d));
            }
        }
    }

    std::vector<EvaluatedDesign> table;
    table.reserve(designs.size());
    for (auto &design : designs) {
        TrialPlan plan;
        plan.params = p;
        plan.spec = spec;
        plan.target = design;
        plan.trials = trials;
        plan.master_seed = master_seed; // common random numbers across designs
        plan.workers = workers;
        const TrialStats stats = run_plan(plan);
        table.push_back({std::move(design), stats.mean_net, stats.halfwidth95});
    }
    return table;
}

SolverReport brute_force_p1(const SystemParams &p, const RicianSpec &spec,
                            const BruteForceGrid &grid, long trials, std::uint64_t master_seed,
                            int workers) {
    const auto table = brute_force_table(p, spec, grid, trials, master_seed, workers);
    const EvaluatedDesign *best = &table.front();
    for (const auto &cand : table) {
        if (cand.mean_net > best->mean_net) {
            best = &cand;
        }
    }
    SolverReport report;
    report.design = best->design;
    report.predicted_net = best->mean_net;
    report.regime = SolverRegime::brute_force;
    report.trained = best->design.n1 > 0;
    report.mc_halfwidth = best->halfwidth95;
    return report;
}

} // namespace wetsim
