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

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "wetsim/common.hpp"

namespace wetsim {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Dominant eigenpair of a Hermitian matrix. The eigenvector is unit norm
/// with its first nonzero component rotated to be real and nonnegative, so
/// results are comparable across runs.
struct EigPair {
    double value = 0.0;
    CVector vector;
};

/// Dominant eigenpair of a Hermitian matrix A.
///
/// A must be square, finite, and Hermitian to 1e-10 relative Frobenius
/// tolerance; it is symmetrized as (A + A^H)/2 before decomposition to
/// absorb round-off from Gram products. The returned pair satisfies
/// ||A v - lambda v|| <= 1e-8 ||A||_F, otherwise NumericError carries the
/// observed residual.
EigPair hermitian_max_eig(const CMatrix &a);

/// rows x cols matrix of i.i.d. circularly symmetric complex Gaussian
/// entries with the given total per-entry variance (real and imaginary
/// parts each N(0, variance/2)). Deterministic given the stream state.
CMatrix sample_cscg(Eigen::Index rows, Eigen::Index cols, double variance, std::mt19937_64 &rng);

/// Rotates v so its first nonzero component is real and nonnegative.
void apply_phase_convention(CVector &v);

/// Squared dominant singular value of h together with the matching right
/// singular vector, i.e. the dominant eigenpair of h^H h, computed on the
/// smaller Gram factor of h. A zero matrix yields value 0 and e1.
EigPair dominant_right_singular(const CMatrix &h);

} // namespace wetsim
