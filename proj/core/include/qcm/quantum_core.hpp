// Copyright 2026 The qcmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>

namespace qcm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace tol {
/// Algebraic identities (Hermiticity, trace, orthonormality).
inline constexpr double kAlgebraic = 1e-12;
/// Lowest eigenvalue still accepted as positive semidefinite.
inline constexpr double kEigenvalue = 1e-10;
}  // namespace tol

/// A validated d x d density matrix (Hermitian, unit trace, PSD), d >= 2.
/// Only obtainable through validate_state and the state constructors below.
class DensityMatrix {
   public:
    int dim() const noexcept {
        return static_cast<int>(rho_.rows());
    }
    const ComplexMatrix &matrix() const noexcept {
        return rho_;
    }
    Complex operator()(int row, int col) const {
        return rho_(row, col);
    }

    /// Eigenvalues in ascending order.
    RealVector eigenvalues() const;
    double purity() const;

    /// <v|rho|v>, real for a valid state.
    double expectation(const ComplexVector &v) const;

    friend DensityMatrix validate_state(const ComplexMatrix &candidate);
    friend DensityMatrix symmetrize_and_project(const ComplexMatrix &candidate, double *projection_distance);

   private:
    explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    }
    ComplexMatrix rho_;
};

/// Checks the density-matrix invariants. Throws qcm::Error with code
/// NotSquare, NotHermitian, TraceNotOne or NotPositive; the message carries
/// the measured violation.
DensityMatrix validate_state(const ComplexMatrix &candidate);

/// Nearest valid state to an arbitrary square matrix: Hermitian part, then
/// eigenvalues clipped at zero and renormalized to unit trace. The trace
/// distance between the Hermitian part (trace-normalized) and the result is
/// written to `projection_distance` when non-null.
DensityMatrix symmetrize_and_project(const ComplexMatrix &candidate, double *projection_distance = nullptr);

/// |psi><psi| for a nonzero vector; normalizes.
DensityMatrix pure_state(const ComplexVector &psi);
DensityMatrix maximally_mixed_state(int d);
DensityMatrix computational_state(int d, int k);
/// Uniform superposition sum_k |k> / sqrt(d).
DensityMatrix plus_state(int d);
/// sum_k i^k |k> / sqrt(d); for d = 2 the +1 eigenstate of sigma_y.
DensityMatrix y_plus_state(int d);

/// |psi><psi| with psi a normalized vector of i.i.d. complex Gaussians
/// drawn from qcm::Rng(seed).
DensityMatrix random_pure_state(int d, uint64_t seed);

/// A Hermitian observable given by an orthonormal eigenbasis (columns of
/// `eigenvectors()`) and real eigenvalues.
class Observable {
   public:
    /// Validates orthonormality (Gram matrix within 1e-12 of identity).
    /// Eigenvalues default to 1, 2, ..., d.
    static Observable make(const ComplexMatrix &eigenvectors, std::optional<RealVector> eigenvalues = std::nullopt);

    int dim() const noexcept {
        return static_cast<int>(vectors_.rows());
    }
    const ComplexMatrix &eigenvectors() const noexcept {
        return vectors_;
    }
    auto eigenvector(int k) const {
        return vectors_.col(k);
    }
    const RealVector &eigenvalues() const noexcept {
        return values_;
    }
    /// sum_k A_k |k><k|.
    ComplexMatrix operator_matrix() const;
    ComplexMatrix projector(int k) const;

    /// Same eigenbasis, different eigenvalues.
    Observable with_eigenvalues(const RealVector &eigenvalues) const;

   private:
    Observable(ComplexMatrix vectors, RealVector values) : vectors_(std::move(vectors)), values_(std::move(values)) {
    }
    ComplexMatrix vectors_;
    RealVector values_;
};

Observable computational_basis(int d);
/// <j|F|k> = exp(2 pi i j k / d) / sqrt(d).
Observable fourier_basis(int d);
/// Haar-random unitary from the QR decomposition of a complex Gaussian
/// matrix, with the diagonal of R made real positive.
Observable random_basis(int d, uint64_t seed);

/// Two observables on the same space together with their overlap matrix.
class ObservablePair {
   public:
    static constexpr double kOverlapThreshold = 1e-9;

    ObservablePair(Observable a, Observable b);

    int dim() const noexcept {
        return a_.dim();
    }
    const Observable &obs_a() const noexcept {
        return a_;
    }
    const Observable &obs_b() const noexcept {
        return b_;
    }
    /// <b|a>, stored as overlaps()(b, a).
    Complex overlap(int b, int a) const {
        return overlaps_(b, a);
    }
    const ComplexMatrix &overlaps() const noexcept {
        return overlaps_;
    }
    /// |<b|a>|^2 indexed (b, a).
    RealMatrix overlap_probabilities() const;
    double min_overlap() const noexcept {
        return min_overlap_;
    }
    bool fully_overlapping() const noexcept {
        return min_overlap_ > kOverlapThreshold;
    }

   private:
    Observable a_;
    Observable b_;
    ComplexMatrix overlaps_;
    double min_overlap_;
};

/// (1/2) * sum of singular values of (x - y).
double trace_distance(const DensityMatrix &x, const DensityMatrix &y);
double trace_distance(const ComplexMatrix &x, const ComplexMatrix &y);

}  // namespace qcm
