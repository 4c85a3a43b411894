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

#include "qcm/measurement.hpp"
#include "qcm/quantum_core.hpp"

namespace qcm {

/// Normalized joint probability p(a,b|1) of the controlled measurement of A
/// followed by a projective measurement of B, indexed probs()(a, b).
class JointOutcomeTable {
   public:
    static constexpr double kClipTolerance = 1e-14;

    /// Entries in [-1e-14, 0) are clipped to zero; anything more negative
    /// raises NegativeProbability. The sum must be 1 within 1e-12
    /// (NotNormalized otherwise).
    static JointOutcomeTable make(RealMatrix probs, double success_prob, const ControlSetting &setting);

    int d() const noexcept {
        return static_cast<int>(probs_.rows());
    }
    const RealMatrix &probs() const noexcept {
        return probs_;
    }
    double operator()(int a, int b) const {
        return probs_(a, b);
    }
    double success_prob() const noexcept {
        return success_prob_;
    }
    const ControlSetting &setting() const noexcept {
        return setting_;
    }
    /// p(a,b|1) * P(1): the unconditioned probability of (a, success, b).
    RealMatrix unconditioned() const {
        return probs_ * success_prob_;
    }

   private:
    JointOutcomeTable(RealMatrix probs, double success_prob, ControlSetting setting)
        : probs_(std::move(probs)), success_prob_(success_prob), setting_(setting) {
    }
    RealMatrix probs_;
    double success_prob_;
    ControlSetting setting_;
};

/// Weights of the identity (error), projective (back-action) and coherence
/// contributions to p(a,b|1). They sum to one; P_C carries the sign of cos phi.
struct QuasiProbTriple {
    double p_identity = 0.0;
    double p_measurement = 0.0;
    double p_coherence = 0.0;
};

/// Complex joint probability rho(a,b) = <b|a><a|rho|b>, indexed values(a, b).
/// Noisy (reconstructed) tables are allowed; use max_invariant_violation to
/// check how far a table is from a valid one.
struct ComplexJointDistribution {
    ComplexMatrix values;
    ObservablePair pair;

    int d() const noexcept {
        return static_cast<int>(values.rows());
    }
    /// sum_b rho(a,b).
    ComplexVector marginal_a() const {
        return values.rowwise().sum();
    }
    /// sum_a rho(a,b).
    ComplexVector marginal_b() const {
        return values.colwise().sum().transpose();
    }
};

/// Closed form
///   p(a,b|1) = [cos^2 t <b|rho|b> + d sin^2 t |<b|a>|^2 <a|rho|a>
///               + 2 sqrt(d) sin t cos t Re(e^{i phi} <b|a><a|rho|b>)] / (2 d P(1)).
JointOutcomeTable exact_joint_probability(const DensityMatrix &state, const ObservablePair &pair,
                                          const ControlSetting &setting);

/// Same table computed as <b|S(a,1) rho S(a,1)^dagger|b> / P(1) from the Kraus operators.
JointOutcomeTable operational_joint_probability(const DensityMatrix &state, const ObservablePair &pair,
                                                const ControlSetting &setting);

ComplexJointDistribution complex_joint_probability(const DensityMatrix &state, const ObservablePair &pair);

/// Largest deviation from the invariants: |sum - 1|, and the imaginary parts
/// and errors of both marginals against the state's basis probabilities.
double max_invariant_violation(const ComplexJointDistribution &dist, const DensityMatrix &state);

/// |cos phi| at or below this is rejected by decompose().
inline constexpr double kPhaseSingularityBound = 1e-3;

/// P_I = cos^2 t / (2 P(1)), P_M = sin^2 t / (2 P(1)),
/// P_C = (2 cos phi / sqrt d) sin t cos t / (2 P(1)).
/// Throws PhaseSingularity if |cos phi| <= 1e-3.
QuasiProbTriple decompose(const ControlSetting &setting);

/// p(a,b|1) assembled from its three contributions:
///   P_I (1/d) <b|rho|b> + P_M |<b|a>|^2 <a|rho|a> + P_C Re(e^{i phi} rho(a,b)) / cos phi.
RealMatrix joint_from_decomposition(const DensityMatrix &state, const ObservablePair &pair,
                                    const ControlSetting &setting);

/// F = 1 - ((d - 1)/d) P_I.
double fidelity_from_decomposition(const QuasiProbTriple &triple, int d);

/// eta = 1 - P_M.
double dephasing_from_decomposition(const QuasiProbTriple &triple);

/// sum_{a,b} A_a B_b rho(a,b), which equals trace(B A rho).
Complex complex_correlation(const ComplexJointDistribution &dist);
Complex complex_correlation(const ComplexJointDistribution &dist, const RealVector &values_a,
                            const RealVector &values_b);

/// sum_{a,b} A_a B_b Im rho(a,b), which equals (i/2) trace([A, B] rho).
double commutator_expectation(const ComplexJointDistribution &dist);
double commutator_expectation(const ComplexJointDistribution &dist, const RealVector &values_a,
                              const RealVector &values_b);

}  // namespace qcm
