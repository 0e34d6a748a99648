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

#include "wetsim/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace wetsim {

namespace {
constexpr double kHermitianRelTol = 1e-10;
constexpr double kResidualRelTol = 1e-8;
} // namespace

EigPair hermitian_max_eig(const CMatrix &a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw ContractViolation("hermitian_max_eig: matrix must be square and nonempty");
    }
    if (!a.allFinite()) {
        throw ContractViolation("hermitian_max_eig: matrix has non-finite entries");
    }
    const double norm = a.norm();
    if ((a - a.adjoint()).norm() > kHermitianRelTol * std::max(norm, 1e-300)) {
        throw ContractViolation("hermitian_max_eig: matrix is not Hermitian within tolerance");
    }

    // Symmetrize to absorb round-off from Gram products before decomposing.
    const CMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericError("hermitian_max_eig: eigensolver did not converge",
                           std::numeric_limits<double>::infinity());
    }

    EigPair out;
    const Eigen::Index last = a.rows() - 1;
    out.value = solver.eigenvalues()(last);
    out.vector = solver.eigenvectors().col(last);
    out.vector.normalize();
    apply_phase_convention(out.vector);

    const double residual = (a * out.vector - out.value * out.vector).norm();
    if (residual > kResidualRelTol * std::max(norm, 1e-300)) {
        throw NumericError("hermitian_max_eig: residual exceeds tolerance", residual);
    }
    return out;
}

void apply_phase_convention(CVector &v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > 1e-12) {
            v *= std::conj(v(i)) / mag;
            return;
        }
    }
}

EigPair dominant_right_singular(const CMatrix &h) {
    if (h.size() == 0) {
        throw ContractViolation("dominant_right_singular: empty matrix");
    }
    EigPair out;
    if (h.norm() == 0.0) {
        out.value = 0.0;
        out.vector = CVector::Zero(h.cols());
        out.vector(0) = 1.0;
        return out;
    }
    if (h.cols() <= h.rows()) {
        return hermitian_max_eig(h.adjoint() * h);
    }
    // Wide matrix: decompose the row Gram and map the eigenvector across,
    // v = h^H u / ||h^H u|| shares the eigenvalue.
    const EigPair left = hermitian_max_eig(h * h.adjoint());
    out.value = left.value;
    out.vector = h.adjoint() * left.vector;
    const double norm = out.vector.norm();
    if (!(norm > 0.0)) {
        out.vector = CVector::Zero(h.cols());
        out.vector(0) = 1.0;
        return out;
    }
    out.vector /= norm;
    apply_phase_convention(out.vector);
    return out;
}

CMatrix sample_cscg(Eigen::Index rows, Eigen::Index cols, double variance, std::mt19937_64 &rng) {
    if (variance < 0.0 || !std::isfinite(variance)) {
        throw ContractViolation("sample_cscg: variance must be finite and >= 0");
    }
    CMatrix out(rows, cols);
    if (variance == 0.0) {
        out.setZero();
        return out;
    }
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(i, j) = std::complex<double>(re, im);
        }
    }
    return out;
}

} // namespace wetsim
