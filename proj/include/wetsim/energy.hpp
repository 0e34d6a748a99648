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

#include "wetsim/numerics.hpp"

namespace wetsim {

/// Scalar system constants for one link. Angles, Rician factor and noise
/// power are linear-scale here; dB/dBm conversions live at the CLI edge.
struct SystemParams {
    int m = 1;              ///< transmit antennas
    int n = 1;              ///< receive antennas
    int t = 1;              ///< symbols per coherent block
    double k = 0.0;         ///< Rician factor, linear
    double beta = 1.0;      ///< large-scale power gain
    double pf = 1.0;        ///< forward transmit power, watts
    double eta = 1.0;       ///< harvester efficiency, (0,1]
    double sigma_r2 = 0.0;  ///< training-phase noise power at the ET, watts

    void validate() const;
};

/// Energy accounting for one coherent block.
struct EnergyReport {
    double harvested = 0.0;
    double training_cost = 0.0;
    double net = 0.0; ///< harvested - training_cost, maintained exactly

    static EnergyReport make(double harvested, double training_cost) {
        return {harvested, training_cost, harvested - training_cost};
    }
};

/// Two-way effective SNR eta * pf * beta^2 / sigma_r2. The squared beta
/// captures round-trip attenuation (reverse training plus forward
/// transfer). Requires sigma_r2 > 0.
double esnr(const SystemParams &p);

/// dBm -> watts (e.g. -90 dBm -> 1e-12 W).
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// dB -> linear power ratio.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Transmit beamformer for an estimated channel: dominant eigenvector of
/// h_hat^H h_hat. A zero estimate (nothing trained, no deterministic part)
/// returns the canonical basis vector e1; any unit vector performs the same
/// in that case.
CVector beamformer_from_estimate(const CMatrix &h_hat);

/// Energy harvested over the t - tau transfer symbols of one block with
/// beamformer v on the true channel: eta (t - tau) pf ||h v||^2.
double block_harvest(const CMatrix &real_h, const CVector &v, const SystemParams &p, int tau);

/// Expected harvest conditioned on the estimate: the beamformed term plus
/// the isotropic contribution of the estimation error and untrained rows,
///   eta (t - tau) pf (lambda_max(h_hat^H h_hat)
///                     + beta/(k+1) (n1 sigma2_tilde + n2)).
double conditional_expected_harvest(const CMatrix &h_hat, double sigma2_tilde, int n1, int n2,
                                    const SystemParams &p, int tau);

/// Full-block harvest with perfect channel knowledge (upper benchmark).
double benchmark_ideal(const CMatrix &real_h, const SystemParams &p);

/// Full-block harvest with the fixed all-ones rank-1 covariance
/// S = (pf/m) 1 1^H (no CSI).
double benchmark_isotropic(const CMatrix &real_h, const SystemParams &p);

/// Full-block harvest beamforming on the deterministic component only.
double benchmark_los(const CMatrix &real_h, const CMatrix &hbar, const SystemParams &p);

} // namespace wetsim
