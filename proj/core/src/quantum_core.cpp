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

#include "qcm/quantum_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qcm/error.hpp"
#include "qcm/rng.hpp"

namespace qcm {

namespace {

std::string fmt_double(double x) {
    std::ostringstream out;
    out.precision(6);
    out << std::scientific << x;
    return out.str();
}

void require_dim(int d) {
    if (d < 2) {
        throw Error(ErrorCode::InvalidArgument, "dimension must be >= 2, got " + std::to_string(d));
    }
}

RealVector hermitian_eigenvalues(const ComplexMatrix &h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

}  // namespace

RealVector DensityMatrix::eigenvalues() const {
    return hermitian_eigenvalues(rho_);
}

double DensityMatrix::purity() const {
    return (rho_ * rho_).trace().real();
}

double DensityMatrix::expectation(const ComplexVector &v) const {
    return v.dot(rho_ * v).real();
}

DensityMatrix validate_state(const ComplexMatrix &candidate) {
    if (candidate.rows() != candidate.cols() || candidate.rows() < 2) {
        throw Error(ErrorCode::NotSquare, "expected a square matrix of dimension >= 2, got " +
                                              std::to_string(candidate.rows()) + "x" +
                                              std::to_string(candidate.cols()));
    }
    const double hermiticity = (candidate - candidate.adjoint()).cwiseAbs().maxCoeff();
    if (hermiticity > tol::kAlgebraic) {
        throw Error(ErrorCode::NotHermitian, "max|rho - rho^dagger| = " + fmt_double(hermiticity) + " exceeds 1e-12");
    }
    const Complex trace = candidate.trace();
    const double trace_error = std::abs(trace - Complex(1.0, 0.0));
    if (trace_error > tol::kAlgebraic) {
        throw Error(ErrorCode::TraceNotOne, "|trace(rho) - 1| = " + fmt_double(trace_error) +
                                                " exceeds 1e-12 (trace = " + fmt_double(trace.real()) + ")");
    }
    ComplexMatrix hermitian = 0.5 * (candidate + candidate.adjoint());
    const double lowest = hermitian_eigenvalues(hermitian).minCoeff();
    if (lowest < -tol::kEigenvalue) {
        throw Error(ErrorCode::NotPositive, "lowest eigenvalue " + fmt_double(lowest) + " is below -1e-10");
    }
    return DensityMatrix(std::move(hermitian));
}

DensityMatrix symmetrize_and_project(const ComplexMatrix &candidate, double *projection_distance) {
    if (candidate.rows() != candidate.cols() || candidate.rows() < 2) {
        throw Error(ErrorCode::NotSquare, "expected a square matrix of dimension >= 2");
    }
    ComplexMatrix hermitian = 0.5 * (candidate + candidate.adjoint());
    const double trace = hermitian.trace().real();
    if (!(trace > 0.0)) {
        throw Error(ErrorCode::TraceNotOne, "cannot normalize a matrix with trace " + fmt_double(trace));
    }
    hermitian /= trace;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian);
    RealVector clipped = solver.eigenvalues().cwiseMax(0.0);
    clipped /= clipped.sum();
    ComplexMatrix projected = solver.eigenvectors() * clipped.cast<Complex>().asDiagonal() *
                              solver.eigenvectors().adjoint();
    projected = 0.5 * (projected + projected.adjoint());
    if (projection_distance != nullptr) {
        *projection_distance = trace_distance(hermitian, projected);
    }
    return DensityMatrix(std::move(projected));
}

DensityMatrix pure_state(const ComplexVector &psi) {
    const double norm = psi.norm();
    if (psi.size() < 2 || !(norm > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "pure_state needs a nonzero vector of dimension >= 2");
    }
    const ComplexVector unit = psi / norm;
    return validate_state(unit * unit.adjoint());
}

DensityMatrix maximally_mixed_state(int d) {
    require_dim(d);
    return validate_state(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix computational_state(int d, int k) {
    require_dim(d);
    if (k < 0 || k >= d) {
        throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(k) + " outside [0, " +
                                                    std::to_string(d) + ")");
    }
    return pure_state(ComplexVector::Unit(d, k));
}

DensityMatrix plus_state(int d) {
    require_dim(d);
    return pure_state(ComplexVector::Ones(d));
}

DensityMatrix y_plus_state(int d) {
    require_dim(d);
    ComplexVector psi(d);
    Complex phase(1.0, 0.0);
    for (int k = 0; k < d; ++k) {
        psi(k) = phase;
        phase *= Complex(0.0, 1.0);
    }
    return pure_state(psi);
}

DensityMatrix random_pure_state(int d, uint64_t seed) {
    require_dim(d);
    Rng rng(seed);
    ComplexVector psi(d);
    for (int k = 0; k < d; ++k) {
        psi(k) = rng.complex_normal();
    }
    return pure_state(psi);
}

Observable Observable::make(const ComplexMatrix &eigenvectors, std::optional<RealVector> eigenvalues) {
    const auto d = eigenvectors.rows();
    if (eigenvectors.cols() != d || d < 2) {
        throw Error(ErrorCode::NotSquare, "eigenvector matrix must be square with dimension >= 2");
    }
    const double gram_error =
        (eigenvectors.adjoint() * eigenvectors - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (gram_error > tol::kAlgebraic) {
        throw Error(ErrorCode::NotOrthonormal, "max|U^dagger U - I| = " + fmt_double(gram_error) + " exceeds 1e-12");
    }
    RealVector values;
    if (eigenvalues) {
        if (eigenvalues->size() != d) {
            throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(d) + " eigenvalues, got " +
                                                          std::to_string(eigenvalues->size()));
        }
        values = *eigenvalues;
    } else {
        values = RealVector::LinSpaced(d, 1.0, static_cast<double>(d));
    }
    return Observable(eigenvectors, std::move(values));
}

ComplexMatrix Observable::operator_matrix() const {
    return vectors_ * values_.cast<Complex>().asDiagonal() * vectors_.adjoint();
}

ComplexMatrix Observable::projector(int k) const {
    if (k < 0 || k >= dim()) {
        throw Error(ErrorCode::IndexOutOfRange, "eigenvector index " + std::to_string(k) + " out of range");
    }
    return vectors_.col(k) * vectors_.col(k).adjoint();
}

Observable Observable::with_eigenvalues(const RealVector &eigenvalues) const {
    return make(vectors_, eigenvalues);
}

Observable computational_basis(int d) {
    require_dim(d);
    return Observable::make(ComplexMatrix::Identity(d, d));
}

Observable fourier_basis(int d) {
    require_dim(d);
    ComplexMatrix f(d, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            // Reduce j*k mod d first so the angle stays small and exact.
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / d;
            f(j, k) = std::polar(scale, angle);
        }
    }
    return Observable::make(f);
}

Observable random_basis(int d, uint64_t seed) {
    require_dim(d);
    Rng rng(seed);
    ComplexMatrix g(d, d);
    for (int col = 0; col < d; ++col) {
        for (int row = 0; row < d; ++row) {
            g(row, col) = rng.complex_normal();
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
    const ComplexMatrix &r = qr.matrixQR();
    for (int k = 0; k < d; ++k) {
        const Complex diag = r(k, k);
        const double mag = std::abs(diag);
        if (mag > 0.0) {
            q.col(k) *= diag / mag;
        }
    }
    return Observable::make(q);
}

ObservablePair::ObservablePair(Observable a, Observable b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.dim() != b_.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "observables act on dimensions " + std::to_string(a_.dim()) +
                                                      " and " + std::to_string(b_.dim()));
    }
    overlaps_ = b_.eigenvectors().adjoint() * a_.eigenvectors();
    min_overlap_ = overlaps_.cwiseAbs().minCoeff();
}

RealMatrix ObservablePair::overlap_probabilities() const {
    return overlaps_.cwiseAbs2();
}

double trace_distance(const ComplexMatrix &x, const ComplexMatrix &y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "trace distance between " + std::to_string(x.rows()) + "x" +
                                                      std::to_string(x.cols()) + " and " +
                                                      std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(x - y);
    return 0.5 * svd.singularValues().sum();
}

double trace_distance(const DensityMatrix &x, const DensityMatrix &y) {
    return trace_distance(x.matrix(), y.matrix());
}

}  // namespace qcm
