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

#include <vector>

#include "wetsim/channel.hpp"

namespace wetsim {

/// Reverse-link pilot configuration: which receive antennas transmit
/// pilots, for how many symbols, and at what power. Training with an empty
/// set is represented upstream as "no training" and never reaches this
/// module.
struct PilotConfig {
    int tau = 1;
    double power = 0.0; ///< watts, unit symbol duration
    std::vector<int> trained_set;

    int n1() const { return static_cast<int>(trained_set.size()); }
    double training_energy() const { return power * static_cast<double>(tau); }
    void validate(int n) const;
};

/// Deterministic tau x n1 pilot block with Phi^H Phi = tau I (truncated DFT
/// columns). Requires tau >= n1 >= 1.
CMatrix pilot_matrix(int tau, int n1);

/// Received pilot block at the transmitter:
///   Y = sqrt(power/n1) Phi H_trained + Z,   Z ~ CSCG(0, sigma_r2).
CMatrix simulate_training(const ChannelRealization &real_channel, const RicianSpec &spec,
                          const PilotConfig &cfg, double sigma_r2, std::mt19937_64 &rng);

/// Linear MMSE channel estimate and its error statistics. sigma2_hat and
/// sigma2_tilde are the per-entry variances of the estimated and residual
/// scattered components on the trained rows; they sum to one exactly.
struct EstimationOutcome {
    CMatrix h_hat;
    double sigma2_hat = 0.0;
    double sigma2_tilde = 1.0;
    double energy_spent = 0.0;
};

/// MMSE estimate of the channel from a received pilot block. Untrained rows
/// carry only the deterministic component; trained rows add the estimated
/// scattered part.
EstimationOutcome mmse_estimate(const CMatrix &y_tr, const RicianSpec &spec,
                                const PilotConfig &cfg, double sigma_r2);

/// Variance of the estimated scattered component (the error variance is its
/// complement to one).
double mmse_estimate_variance(double beta, double k, double power, int tau, int n1,
                              double sigma_r2);

} // namespace wetsim
