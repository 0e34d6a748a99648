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

#include <complex>
#include <vector>

#include "wetsim/numerics.hpp"

namespace wetsim {

/// Uniform linear array described by element count and spacing in carrier
/// wavelengths.
struct ArrayGeometry {
    int element_count = 1;
    double spacing_wavelengths = 0.5;

    void validate() const;
};

/// One deterministic propagation path: complex gain plus angle of arrival
/// (receiver side) and angle of departure (transmitter side), in radians.
struct RicianPath {
    std::complex<double> gain{1.0, 0.0};
    double aoa_rad = 0.0;
    double aod_rad = 0.0;
};

/// Steering vector of a ULA for a plane wave at angle theta: element m is
/// exp(j 2 pi m d sin(theta)), element 0 is 1.
CVector array_response(const ArrayGeometry &geom, double theta_rad);

/// Deterministic channel component assembled from path gains and steering
/// vectors; with normalize set, rescaled so that the squared Frobenius norm
/// equals rx_elements * tx_elements (unit average power per antenna pair).
CMatrix build_hbar(const std::vector<RicianPath> &paths, const ArrayGeometry &rx_geom,
                   const ArrayGeometry &tx_geom, bool normalize);

/// Static description of an N x M Rician fading channel: deterministic
/// component hbar (normalized to ||hbar||_F^2 = M N), Rician factor k
/// (linear power ratio), and large-scale gain beta.
struct RicianSpec {
    int m = 1;    ///< transmit antennas
    int n = 1;    ///< receive antennas
    double k = 0.0;
    double beta = 1.0;
    CMatrix hbar;
    std::vector<RicianPath> paths; ///< optional provenance of hbar

    void validate() const;

    /// Pure Rayleigh spec (k = 0). hbar is an all-ones placeholder that
    /// satisfies the normalization but never contributes.
    static RicianSpec rayleigh(int n, int m, double beta);

    /// Spec with hbar built from explicit paths (normalized).
    static RicianSpec from_paths(int n, int m, double k, double beta,
                                 const std::vector<RicianPath> &paths,
                                 double spacing_wavelengths = 0.5);

    /// Single-path spec: hbar = a_r(aoa) a_t(aod)^H.
    static RicianSpec rank1(int n, int m, double k, double beta, double aoa_rad, double aod_rad,
                            double spacing_wavelengths = 0.5);
};

/// One channel draw: the full matrix together with the scattered part it
/// was assembled from, so that
///   h = sqrt(beta k/(k+1)) hbar + sqrt(beta/(k+1)) hw
/// reconstructs exactly.
struct ChannelRealization {
    CMatrix h;
    CMatrix hw;
};

ChannelRealization draw_channel(const RicianSpec &spec, std::mt19937_64 &rng);

/// Throws unless the set is strictly ascending with entries in [0, n).
void validate_trained_set(const std::vector<int> &trained_set, int n);

/// Row split of a channel matrix into trained rows (ascending order of the
/// given set) and the remaining rows. original_row[i] is the source row of
/// stacked row i, i.e. the permutation taking [trained; rest] back to h.
struct RowPartition {
    CMatrix trained;
    CMatrix rest;
    std::vector<int> original_row;
};

RowPartition partition(const CMatrix &h, const std::vector<int> &trained_set);

/// Inverse of partition: rebuilds the original matrix, bitwise.
CMatrix reassemble(const RowPartition &parts);

} // namespace wetsim
