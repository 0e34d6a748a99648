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

#include "wetsim/training.hpp"

#include <cmath>
#include <numbers>

namespace wetsim {

void PilotConfig::validate(int n) const {
    validate_trained_set(trained_set, n);
    if (trained_set.empty()) {
        throw ContractViolation("PilotConfig: empty trained set (no-training is decided upstream)");
    }
    if (tau < n1()) {
        throw ContractViolation("PilotConfig: tau must be >= number of trained antennas");
    }
    if (power < 0.0 || !std::isfinite(power)) {
        throw ContractViolation("PilotConfig: power must be finite and >= 0");
    }
}

CMatrix pilot_matrix(int tau, int n1) {
    if (n1 < 1 || tau < n1) {
        throw ContractViolation("pilot_matrix: requires tau >= n1 >= 1");
    }
    // Truncated DFT columns: orthogonal with squared column norm tau.
    CMatrix phi(tau, n1);
    for (int t = 0; t < tau; ++t) {
        for (int c = 0; c < n1; ++c) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(t) *
                                 static_cast<double>(c) / static_cast<double>(tau);
            phi(t, c) = std::polar(1.0, angle);
        }
    }
    return phi;
}

CMatrix simulate_training(const ChannelRealization &real_channel, const RicianSpec &spec,
                          const PilotConfig &cfg, double sigma_r2, std::mt19937_64 &rng) {
    cfg.validate(spec.n);
    if (sigma_r2 < 0.0 || !std::isfinite(sigma_r2)) {
        throw ContractViolation("simulate_training: sigma_r2 must be finite and >= 0");
    }
    if (real_channel.h.rows() != spec.n || real_channel.h.cols() != spec.m) {
        throw ContractViolation("simulate_training: channel shape mismatch");
    }
    const int n1 = cfg.n1();
    const CMatrix phi = pilot_matrix(cfg.tau, n1);
    const CMatrix h_trained = partition(real_channel.h, cfg.trained_set).trained;
    const CMatrix noise = sample_cscg(cfg.tau, spec.m, sigma_r2, rng);
    return std::sqrt(cfg.power / static_cast<double>(n1)) * phi * h_trained + noise;
}

double mmse_estimate_variance(double beta, double k, double power, int tau, int n1,
                              double sigma_r2) {
    const double signal = beta * power * static_cast<double>(tau);
    const double noise = sigma_r2 * static_cast<double>(n1) * (k + 1.0);
    if (signal <= 0.0) {
        return 0.0;
    }
    if (noise <= 0.0) {
        return 1.0;
    }
    return signal / (signal + noise);
}

EstimationOutcome mmse_estimate(const CMatrix &y_tr, const RicianSpec &spec,
                                const PilotConfig &cfg, double sigma_r2) {
    cfg.validate(spec.n);
    const int n1 = cfg.n1();
    if (y_tr.rows() != cfg.tau || y_tr.cols() != spec.m) {
        throw ContractViolation("mmse_estimate: received block shape mismatch");
    }

    const double kf = spec.k;
    const double beta = spec.beta;
    const double pr = cfg.power;
    const double tau = static_cast<double>(cfg.tau);

    EstimationOutcome out;
    out.sigma2_hat = mmse_estimate_variance(beta, kf, pr, cfg.tau, n1, sigma_r2);
    out.sigma2_tilde = 1.0 - out.sigma2_hat; // complement by construction
    out.energy_spent = cfg.training_energy();

    const CMatrix phi = pilot_matrix(cfg.tau, n1);
    const CMatrix hbar_trained = partition(spec.hbar, cfg.trained_set).trained;

    // Strip the known deterministic contribution from the received pilots,
    // then correlate with the pilot block and apply the MMSE gain.
    const double denom = pr * tau * beta + sigma_r2 * static_cast<double>(n1) * (kf + 1.0);
    CMatrix hw_hat;
    if (pr <= 0.0 || denom <= 0.0) {
        hw_hat = CMatrix::Zero(n1, spec.m);
    } else {
        const double gain =
            std::sqrt(pr * beta * static_cast<double>(n1) * (kf + 1.0)) / denom;
        const double det_pilot_scale =
            std::sqrt(pr * beta * kf / (static_cast<double>(n1) * (kf + 1.0)));
        hw_hat = gain * phi.adjoint() * (y_tr - det_pilot_scale * phi * hbar_trained);
    }

    const double det_scale = std::sqrt(beta * kf / (kf + 1.0));
    const double scatter_scale = std::sqrt(beta / (kf + 1.0));
    out.h_hat = det_scale * spec.hbar;
    for (int i = 0; i < n1; ++i) {
        out.h_hat.row(cfg.trained_set[i]) += scatter_scale * hw_hat.row(i);
    }
    return out;
}

} // namespace wetsim
