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

#include "wetsim/energy.hpp"

#include <cmath>

namespace wetsim {

void SystemParams::validate() const {
    if (m < 1 || n < 1) {
        throw ContractViolation("SystemParams: antenna counts must be >= 1");
    }
    if (t < 1) {
        throw ContractViolation("SystemParams: block length must be >= 1");
    }
    if (k < 0.0 || !std::isfinite(k)) {
        throw ContractViolation("SystemParams: k must be finite and >= 0");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ContractViolation("SystemParams: beta must be positive and finite");
    }
    if (!(pf > 0.0) || !std::isfinite(pf)) {
        throw ContractViolation("SystemParams: pf must be positive and finite");
    }
    if (!(eta > 0.0) || eta > 1.0) {
        throw ContractViolation("SystemParams: eta must be in (0, 1]");
    }
    if (sigma_r2 < 0.0 || !std::isfinite(sigma_r2)) {
        throw ContractViolation("SystemParams: sigma_r2 must be finite and >= 0");
    }
}

double esnr(const SystemParams &p) {
    p.validate();
    if (!(p.sigma_r2 > 0.0)) {
        throw ContractViolation("esnr: undefined for zero noise power");
    }
    return p.eta * p.pf * p.beta * p.beta / p.sigma_r2;
}

CVector beamformer_from_estimate(const CMatrix &h_hat) {
    if (h_hat.size() == 0) {
        throw ContractViolation("beamformer_from_estimate: empty estimate");
    }
    return dominant_right_singular(h_hat).vector;
}

double block_harvest(const CMatrix &real_h, const CVector &v, const SystemParams &p, int tau) {
    if (tau < 0 || tau > p.t) {
        throw ContractViolation("block_harvest: tau must lie in [0, t]");
    }
    if (real_h.cols() != v.size()) {
        throw ContractViolation("block_harvest: beamformer length mismatch");
    }
    const double symbols = static_cast<double>(p.t - tau);
    return p.eta * symbols * p.pf * (real_h * v).squaredNorm();
}

double conditional_expected_harvest(const CMatrix &h_hat, double sigma2_tilde, int n1, int n2,
                                    const SystemParams &p, int tau) {
    if (n1 + n2 != p.n) {
        throw ContractViolation("conditional_expected_harvest: n1 + n2 must equal n");
    }
    if (tau < 0 || tau > p.t) {
        throw ContractViolation("conditional_expected_harvest: tau must lie in [0, t]");
    }
    const double peak = dominant_right_singular(h_hat).value;
    const double residual_power = p.beta / (p.k + 1.0) *
                                  (static_cast<double>(n1) * sigma2_tilde +
                                   static_cast<double>(n2));
    return p.eta * static_cast<double>(p.t - tau) * p.pf * (peak + residual_power);
}

double benchmark_ideal(const CMatrix &real_h, const SystemParams &p) {
    const double peak = dominant_right_singular(real_h).value;
    return p.eta * static_cast<double>(p.t) * p.pf * peak;
}

double benchmark_isotropic(const CMatrix &real_h, const SystemParams &p) {
    // S = (pf/m) 1 1^H, i.e. eta t tr(H^H H S) = eta t (pf/m) ||H 1||^2.
    const CVector ones = CVector::Ones(real_h.cols());
    return p.eta * static_cast<double>(p.t) * p.pf / static_cast<double>(p.m) *
           (real_h * ones).squaredNorm();
}

double benchmark_los(const CMatrix &real_h, const CMatrix &hbar, const SystemParams &p) {
    const CVector v = dominant_right_singular(hbar).vector;
    return p.eta * static_cast<double>(p.t) * p.pf * (real_h * v).squaredNorm();
}

} // namespace wetsim
