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

#include "wetsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wetsim {

void ArrayGeometry::validate() const {
    if (element_count < 1) {
        throw ContractViolation("ArrayGeometry: element_count must be >= 1");
    }
    if (!(spacing_wavelengths > 0.0) || !std::isfinite(spacing_wavelengths)) {
        throw ContractViolation("ArrayGeometry: spacing must be positive and finite");
    }
}

CVector array_response(const ArrayGeometry &geom, double theta_rad) {
    geom.validate();
    CVector v(geom.element_count);
    const double phase_step = 2.0 * std::numbers::pi * geom.spacing_wavelengths *
                              std::sin(theta_rad);
    for (int m = 0; m < geom.element_count; ++m) {
        v(m) = std::polar(1.0, phase_step * static_cast<double>(m));
    }
    return v;
}

CMatrix build_hbar(const std::vector<RicianPath> &paths, const ArrayGeometry &rx_geom,
                   const ArrayGeometry &tx_geom, bool normalize) {
    if (paths.empty()) {
        throw ContractViolation("build_hbar: at least one path required");
    }
    rx_geom.validate();
    tx_geom.validate();
    CMatrix hbar = CMatrix::Zero(rx_geom.element_count, tx_geom.element_count);
    for (const auto &path : paths) {
        hbar += path.gain * array_response(rx_geom, path.aoa_rad) *
                array_response(tx_geom, path.aod_rad).adjoint();
    }
    if (normalize) {
        const double power = hbar.squaredNorm();
        if (power <= 0.0) {
            throw ContractViolation("build_hbar: zero-energy component cannot be normalized");
        }
        const double target = static_cast<double>(rx_geom.element_count) *
                              static_cast<double>(tx_geom.element_count);
        hbar *= std::sqrt(target / power);
    }
    return hbar;
}

void RicianSpec::validate() const {
    if (m < 1 || n < 1) {
        throw ContractViolation("RicianSpec: antenna counts must be >= 1");
    }
    if (k < 0.0 || !std::isfinite(k)) {
        throw ContractViolation("RicianSpec: k must be finite and >= 0");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ContractViolation("RicianSpec: beta must be positive and finite");
    }
    if (hbar.rows() != n || hbar.cols() != m) {
        throw ContractViolation("RicianSpec: hbar must be n x m");
    }
    const double target = static_cast<double>(m) * static_cast<double>(n);
    if (std::abs(hbar.squaredNorm() - target) > 1e-6 * target) {
        throw ContractViolation("RicianSpec: hbar violates the power normalization");
    }
}

RicianSpec RicianSpec::rayleigh(int n, int m, double beta) {
    RicianSpec spec;
    spec.m = m;
    spec.n = n;
    spec.k = 0.0;
    spec.beta = beta;
    spec.hbar = CMatrix::Ones(n, m);
    spec.validate();
    return spec;
}

RicianSpec RicianSpec::from_paths(int n, int m, double k, double beta,
                                  const std::vector<RicianPath> &paths,
                                  double spacing_wavelengths) {
    RicianSpec spec;
    spec.m = m;
    spec.n = n;
    spec.k = k;
    spec.beta = beta;
    spec.paths = paths;
    spec.hbar = build_hbar(paths, {n, spacing_wavelengths}, {m, spacing_wavelengths}, true);
    spec.validate();
    return spec;
}

RicianSpec RicianSpec::rank1(int n, int m, double k, double beta, double aoa_rad, double aod_rad,
                             double spacing_wavelengths) {
    return from_paths(n, m, k, beta, {{std::complex<double>(1.0, 0.0), aoa_rad, aod_rad}},
                      spacing_wavelengths);
}

ChannelRealization draw_channel(const RicianSpec &spec, std::mt19937_64 &rng) {
    spec.validate();
    ChannelRealization real;
    real.hw = sample_cscg(spec.n, spec.m, 1.0, rng);
    const double det_scale = std::sqrt(spec.beta * spec.k / (spec.k + 1.0));
    const double scatter_scale = std::sqrt(spec.beta / (spec.k + 1.0));
    real.h = det_scale * spec.hbar + scatter_scale * real.hw;
    return real;
}

void validate_trained_set(const std::vector<int> &trained_set, int n) {
    int prev = -1;
    for (int idx : trained_set) {
        if (idx < 0 || idx >= n) {
            throw ContractViolation("trained_set: antenna index out of range");
        }
        if (idx <= prev) {
            throw ContractViolation("trained_set: indices must be strictly ascending");
        }
        prev = idx;
    }
}

RowPartition partition(const CMatrix &h, const std::vector<int> &trained_set) {
    const int n = static_cast<int>(h.rows());
    validate_trained_set(trained_set, n);

    std::vector<bool> trained(n, false);
    for (int idx : trained_set) {
        trained[idx] = true;
    }

    RowPartition parts;
    const int n1 = static_cast<int>(trained_set.size());
    parts.trained.resize(n1, h.cols());
    parts.rest.resize(n - n1, h.cols());
    parts.original_row.reserve(n);

    for (int i = 0; i < n1; ++i) {
        parts.trained.row(i) = h.row(trained_set[i]);
        parts.original_row.push_back(trained_set[i]);
    }
    int j = 0;
    for (int row = 0; row < n; ++row) {
        if (!trained[row]) {
            parts.rest.row(j++) = h.row(row);
            parts.original_row.push_back(row);
        }
    }
    return parts;
}

CMatrix reassemble(const RowPartition &parts) {
    const Eigen::Index n1 = parts.trained.rows();
    const Eigen::Index n = n1 + parts.rest.rows();
    const Eigen::Index cols = (n1 > 0) ? parts.trained.cols() : parts.rest.cols();
    CMatrix h(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = (i < n1) ? parts.trained.row(i) : parts.rest.row(i - n1);
        h.row(parts.original_row[static_cast<std::size_t>(i)]) = row;
    }
    return h;
}

} // namespace wetsim
