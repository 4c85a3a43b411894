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

#include "qcm/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "qcm/error.hpp"

namespace qcm {

namespace {

void check_dims(const DensityMatrix &state, const ObservablePair &pair, const ControlSetting &setting) {
    if (state.dim() != pair.dim() || setting.d() != pair.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state d = " + std::to_string(state.dim()) + ", observables d = " +
                                                      std::to_string(pair.dim()) + ", setting d = " +
                                                      std::to_string(setting.d()));
    }
}

void check_dims(const DensityMatrix &state, const ObservablePair &pair) {
    if (state.dim() != pair.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state d = " + std::to_string(state.dim()) +
                                                      ", observables d = " + std::to_string(pair.dim()));
    }
}

void check_eigenvalues(const ComplexJointDistribution &dist, const RealVector &values_a, const RealVector &values_b) {
    if (values_a.size() != dist.d() || values_b.size() != dist.d()) {
        throw Error(ErrorCode::DimensionMismatch, "eigenvalue vectors must have length " + std::to_string(dist.d()));
    }
}

/// <a|rho|a> for every a.
RealVector basis_probabilities(const DensityMatrix &state, const Observable &obs) {
    const ComplexMatrix &u = obs.eigenvectors();
    return (u.adjoint() * state.matrix() * u).diagonal().real();
}

}  // namespace

JointOutcomeTable JointOutcomeTable::make(RealMatrix probs, double success_prob, const ControlSetting &setting) {
    if (probs.rows() != setting.d() || probs.cols() != setting.d()) {
        throw Error(ErrorCode::DimensionMismatch, "joint table must be " + std::to_string(setting.d()) + "x" +
                                                      std::to_string(setting.d()));
    }
    const double lowest = probs.minCoeff();
    if (lowest < -kClipTolerance) {
        std::ostringstream msg;
        msg << "joint probability entry " << lowest << " is below -1e-14";
        throw Error(ErrorCode::NegativeProbability, msg.str());
    }
    probs = probs.cwiseMax(0.0);
    const double total = probs.sum();
    if (std::abs(total - 1.0) > tol::kAlgebraic) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "joint probabilities sum to " << total;
        throw Error(ErrorCode::NotNormalized, msg.str());
    }
    return JointOutcomeTable(std::move(probs), success_prob, setting);
}

JointOutcomeTable exact_joint_probability(const DensityMatrix &state, const ObservablePair &pair,
                                          const ControlSetting &setting) {
    check_dims(state, pair, setting);
    const int d = pair.dim();
    const double dd = d;
    const double c = std::cos(setting.theta());
    const double s = std::sin(setting.theta());
    const double p1 = success_probability(setting);
    const Complex phase = std::polar(1.0, setting.phi());

    const ComplexMatrix &ua = pair.obs_a().eigenvectors();
    const ComplexMatrix &ub = pair.obs_b().eigenvectors();
    const RealVector prob_a = basis_probabilities(state, pair.obs_a());
    const RealVector prob_b = basis_probabilities(state, pair.obs_b());
    // mixed(a, b) = <a|rho|b>
    const ComplexMatrix mixed = ua.adjoint() * state.matrix() * ub;

    RealMatrix probs(d, d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const Complex overlap = pair.overlap(b, a);
            const double identity_term = c * c * prob_b(b);
            const double projective_term = dd * s * s * std::norm(overlap) * prob_a(a);
            const double coherence_term = 2.0 * std::sqrt(dd) * s * c * (phase * overlap * mixed(a, b)).real();
            probs(a, b) = (identity_term + projective_term + coherence_term) / (2.0 * dd * p1);
        }
    }
    return JointOutcomeTable::make(std::move(probs), p1, setting);
}

JointOutcomeTable operational_joint_probability(const DensityMatrix &state, const ObservablePair &pair,
                                                const ControlSetting &setting) {
    check_dims(state, pair, setting);
    const int d = pair.dim();
    const KrausSet kraus = build_kraus_set(pair.obs_a(), setting);
    const double p1 = success_probability(setting);
    const ComplexMatrix &ub = pair.obs_b().eigenvectors();
    RealMatrix probs(d, d);
    for (int a = 0; a < d; ++a) {
        const ComplexMatrix &op = kraus.success_ops[a];
        const ComplexMatrix post = ub.adjoint() * op * state.matrix() * op.adjoint() * ub;
        probs.row(a) = post.diagonal().real().transpose() / p1;
    }
    return JointOutcomeTable::make(std::move(probs), p1, setting);
}

ComplexJointDistribution complex_joint_probability(const DensityMatrix &state, const ObservablePair &pair) {
    check_dims(state, pair);
    const ComplexMatrix mixed = pair.obs_a().eigenvectors().adjoint() * state.matrix() * pair.obs_b().eigenvectors();
    // values(a, b) = <b|a> <a|rho|b>; overlaps is indexed (b, a).
    ComplexMatrix values = pair.overlaps().transpose().cwiseProduct(mixed);
    return ComplexJointDistribution{std::move(values), pair};
}

double max_invariant_violation(const ComplexJointDistribution &dist, const DensityMatrix &state) {
    check_dims(state, dist.pair);
    const RealVector prob_a = basis_probabilities(state, dist.pair.obs_a());
    const RealVector prob_b = basis_probabilities(state, dist.pair.obs_b());
    const ComplexVector ma = dist.marginal_a();
    const ComplexVector mb = dist.marginal_b();
    double worst = std::abs(dist.values.sum() - Complex(1.0, 0.0));
    worst = std::max(worst, (ma - prob_a.cast<Complex>()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (mb - prob_b.cast<Complex>()).cwiseAbs().maxCoeff());
    return worst;
}

QuasiProbTriple decompose(const ControlSetting &setting) {
    const double cos_phi = std::cos(setting.phi());
    if (std::abs(cos_phi) <= kPhaseSingularityBound) {
        throw Error(ErrorCode::PhaseSingularity, "|cos phi| = " + std::to_string(std::abs(cos_phi)) +
                                                     " <= 1e-3; the coherence term is undefined");
    }
    const double c = std::cos(setting.theta());
    const double s = std::sin(setting.theta());
    const double norm = 2.0 * success_probability(setting);
    return QuasiProbTriple{
        c * c / norm,
        s * s / norm,
        (2.0 * cos_phi / std::sqrt(static_cast<double>(setting.d()))) * s * c / norm,
    };
}

RealMatrix joint_from_decomposition(const DensityMatrix &state, const ObservablePair &pair,
                                    const ControlSetting &setting) {
    check_dims(state, pair, setting);
    const QuasiProbTriple triple = decompose(setting);
    const int d = pair.dim();
    const RealVector prob_a = basis_probabilities(state, pair.obs_a());
    const RealVector prob_b = basis_probabilities(state, pair.obs_b());
    const ComplexJointDistribution dist = complex_joint_probability(state, pair);
    const Complex phase = std::polar(1.0, setting.phi());
    const double cos_phi = std::cos(setting.phi());
    RealMatrix out(d, d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            out(a, b) = triple.p_identity * prob_b(b) / d +
                        triple.p_measurement * std::norm(pair.overlap(b, a)) * prob_a(a) +
                        triple.p_coherence * (phase * dist.values(a, b)).real() / cos_phi;
        }
    }
    return out;
}

double fidelity_from_decomposition(const QuasiProbTriple &triple, int d) {
    return 1.0 - (static_cast<double>(d) - 1.0) / d * triple.p_identity;
}

double dephasing_from_decomposition(const QuasiProbTriple &triple) {
    return 1.0 - triple.p_measurement;
}

Complex complex_correlation(const ComplexJointDistribution &dist, const RealVector &values_a,
                            const RealVector &values_b) {
    check_eigenvalues(dist, values_a, values_b);
    return values_a.cast<Complex>().dot(dist.values * values_b.cast<Complex>());
}

Complex complex_correlation(const ComplexJointDistribution &dist) {
    return complex_correlation(dist, dist.pair.obs_a().eigenvalues(), dist.pair.obs_b().eigenvalues());
}

double commutator_expectation(const ComplexJointDistribution &dist, const RealVector &values_a,
                              const RealVector &values_b) {
    check_eigenvalues(dist, values_a, values_b);
    return values_a.dot(dist.values.imag() * values_b);
}

double commutator_expectation(const ComplexJointDistribution &dist) {
    return commutator_expectation(dist, dist.pair.obs_a().eigenvalues(), dist.pair.obs_b().eigenvalues());
}

}  // namespace qcm
