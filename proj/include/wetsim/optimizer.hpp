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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "wetsim/channel.hpp"
#include "wetsim/energy.hpp"

namespace wetsim {

/// Candidate or optimal reverse-link training design. Solver outputs always
/// have tau == n1; the brute-force oracle also explores tau > n1.
struct TrainingDesign {
    int n1 = 0;
    std::vector<int> trained_set;
    int tau = 0;
    double pr = 0.0;

    static TrainingDesign no_training() { return {}; }
    /// First n1 antennas; the canonical set when antennas are statistically
    /// equivalent.
    static TrainingDesign leading(int n1, int tau, double pr);
    void validate(int n, int t) const;
};

enum class SolverRegime { rayleigh, miso_rician, large_m, brute_force };

const char *to_string(SolverRegime regime);

/// Optimizer output: the chosen design and its predicted net energy.
/// mc_halfwidth is nonzero only for the Monte Carlo (brute-force) solver.
struct SolverReport {
    TrainingDesign design;
    double predicted_net = 0.0;
    SolverRegime regime = SolverRegime::rayleigh;
    bool trained = false;
    double mc_halfwidth = 0.0;
};

// ---------------------------------------------------------------------------
// Expected peak eigenvalue of Gaussian Gram matrices
// ---------------------------------------------------------------------------

/// One table entry: trials == 0 marks a pinned analytic value.
struct LambdaEntry {
    double value = 0.0;
    long trials = 0;
    double halfwidth = 0.0;

    /// Sampled from too few trials to be trusted blindly.
    bool low_trials() const { return trials > 0 && trials < 1000; }
};

/// Exact E[lambda_max(G^H G)] for an n1 x m i.i.d. CN(0,1) matrix when the
/// smaller dimension is 1 or 2; empty otherwise. The min-side-2 case is an
/// elementary two-variable moment integral with a closed-form series.
std::optional<double> wishart_max_eig_mean_exact(int m, int n1);

/// Monte Carlo estimate of E[lambda_max(G^H G)] over `trials` draws.
/// Reproducible given (seed, trials) for any worker count.
LambdaEntry wishart_max_eig_mean_mc(int m, int n1, long trials, std::uint64_t seed,
                                    int workers = 0);

/// Expected peak-eigenvalue table Lambda(m, n1), pinned to analytic values
/// where available and otherwise filled by cached Monte Carlo estimates.
/// Entries are deterministic functions of (seed, m, n1, trials), so lookup
/// order never changes results. Thread-safe.
class LambdaTable {
  public:
    explicit LambdaTable(std::uint64_t seed = 0, long default_trials = 400000);

    /// Value of Lambda(m, n1), computing and caching on first use.
    double value(int m, int n1);
    LambdaEntry entry(int m, int n1);

    /// Compute (or upgrade to at least `trials`) one entry.
    void ensure(int m, int n1, long trials);

    /// Merge entries from a cache file; keeps the higher-trial entry on
    /// conflict. Missing file is not an error (cold cache).
    void load_csv(const std::filesystem::path &path);
    void save_csv(const std::filesystem::path &path) const;

    std::uint64_t seed() const { return seed_; }
    long default_trials() const { return default_trials_; }

  private:
    LambdaEntry compute(int m, int n1, long trials) const;

    std::uint64_t seed_;
    long default_trials_;
    mutable std::unique_ptr<std::mutex> mutex_;
    std::map<std::pair<int, int>, LambdaEntry> entries_;
};

/// Convenience estimator matching the table's policy: analytic when
/// available, Monte Carlo otherwise.
double lambda_mn(int m, int n1, long trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Closed-form net-energy expressions (per-block averages, joules)
// ---------------------------------------------------------------------------

/// Rayleigh (k = 0) net average harvested energy for an arbitrary
/// (n1, tau, pr) design.
double rayleigh_net_energy(const SystemParams &p, int n1, int tau, double pr, double lambda);

/// Optimal training power for n1 trained antennas (tau = n1), Rayleigh.
double rayleigh_opt_power(const SystemParams &p, int n1, double lambda);

/// Whether n1 trained antennas can beat the no-training baseline, Rayleigh.
bool rayleigh_training_profitable(const SystemParams &p, int n1, double lambda);

/// Net value at the optimal power for n1 trained antennas, Rayleigh.
double rayleigh_net_value(const SystemParams &p, int n1, double lambda);

/// MISO Rician net average harvested energy, arbitrary (n1 in {0,1}, tau, pr).
double miso_net_energy(const SystemParams &p, int n1, int tau, double pr);

double miso_opt_power(const SystemParams &p);
bool miso_should_train(const SystemParams &p);
double miso_net_value(const SystemParams &p, int n1);

/// Large-m lower-bound net energy for an arbitrary design. `w` is the
/// squared norm of the first n1 entries of the deterministic component's
/// dominant eigenvector after sorting magnitudes in non-increasing order.
double large_m_net_energy(const SystemParams &p, double lambda_bar, double w, int n1, int tau,
                          double pr);

double large_m_opt_power(const SystemParams &p, double w, int n1);
double large_m_net_value(const SystemParams &p, double lambda_bar, double w, int n1);

/// Reduced large-m objective for a rank-1 deterministic component, used by
/// the closed-form antenna count: (t - n1)(k n + n1/n) up to a constant.
double rank1_reduced_objective(const SystemParams &p, double n1);

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

/// Optimal design over n1 in {0..n} for Rayleigh fading (requires k == 0).
/// Ties break toward fewer trained antennas.
SolverReport solve_rayleigh(const SystemParams &p, LambdaTable &table);

/// Binary train / no-train decision for a single-antenna receiver in Rician
/// fading (requires n == 1).
SolverReport solve_miso_rician(const SystemParams &p);

/// Approximate design for m >> n built on the lower bound of the net
/// energy; trains the antennas with the largest dominant-eigenvector
/// magnitudes of hbar hbar^H. Requires m >= n.
SolverReport solve_large_m(const SystemParams &p, const CMatrix &hbar);

/// Closed-form optimal trained-antenna count for the rank-1 large-m case:
/// (t - k n^2)/2 clamped to [0, n], with non-integer interior values
/// resolved against the reduced objective.
int closed_form_n1_rank1(const SystemParams &p);

// ---------------------------------------------------------------------------
// Exhaustive Monte Carlo oracle
// ---------------------------------------------------------------------------

struct BruteForceGrid {
    std::vector<int> taus;
    std::vector<double> powers;
};

struct TrialStats; // simkit.hpp

struct EvaluatedDesign {
    TrainingDesign design;
    double mean_net = 0.0;
    double halfwidth95 = 0.0;
};

/// Simulated net energy for every antenna subset and feasible (tau, pr)
/// grid point, via the full two-phase protocol with common random numbers
/// across designs. Guarded to n <= 12 receive antennas.
std::vector<EvaluatedDesign> brute_force_table(const SystemParams &p, const RicianSpec &spec,
                                               const BruteForceGrid &grid, long trials,
                                               std::uint64_t master_seed, int workers = 0);

/// Empirical argmax of brute_force_table.
SolverReport brute_force_p1(const SystemParams &p, const RicianSpec &spec,
                            const BruteForceGrid &grid, long trials, std::uint64_t master_seed,
                            int workers = 0);

} // namespace wetsim
