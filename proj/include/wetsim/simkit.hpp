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
#include <variant>

#include "wetsim/optimizer.hpp"
#include "wetsim/training.hpp"

namespace wetsim {

enum class BenchmarkScheme { ideal, isotropic, los };

const char *to_string(BenchmarkScheme scheme);

/// One Monte Carlo experiment: average the two-phase protocol (or a
/// benchmark scheme) over independent channel realizations.
struct TrialPlan {
    SystemParams params;
    RicianSpec spec;
    std::variant<TrainingDesign, BenchmarkScheme> target;
    long trials = 10000;
    std::uint64_t master_seed = 0;
    int workers = 0; ///< 0 = hardware concurrency
};

/// Sample statistics of the simulated block energies. halfwidth95 is the
/// normal-approximation 95% confidence halfwidth of mean_net; it is 0 when
/// trials < 2 (not applicable).
struct TrialStats {
    double mean_net = 0.0;
    double mean_harvested = 0.0;
    double halfwidth95 = 0.0;
    long trials = 0;
};

/// One coherent block of the two-phase protocol on a fresh channel draw:
/// pilot phase and MMSE estimation when the design trains, beamforming on
/// the estimate, harvest over the remaining symbols on the true channel.
/// A non-training design skips phase one and beamforms on the deterministic
/// component alone.
EnergyReport run_block(const RicianSpec &spec, const SystemParams &params,
                       const TrainingDesign &design, std::mt19937_64 &rng);

/// One full-block benchmark draw (no training phase).
EnergyReport run_benchmark_block(const RicianSpec &spec, const SystemParams &params,
                                 BenchmarkScheme scheme, std::mt19937_64 &rng);

/// Mean and confidence halfwidth over plan.trials independent blocks.
/// Trials are chunked onto derived RNG streams keyed by chunk index, so the
/// sampled trajectories are a pure function of master_seed; results agree
/// across worker counts to reduction round-off (<= 1e-9 relative).
TrialStats run_plan(const TrialPlan &plan);

} // namespace wetsim
