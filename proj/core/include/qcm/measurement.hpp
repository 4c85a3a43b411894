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

#include <vector>

#include "qcm/quantum_core.hpp"

namespace qcm {

/// Strength theta in [0, pi/2] and control phase phi, normalized into
/// [0, 2 pi), for a d-level system.
class ControlSetting {
   public:
    /// Throws InvalidSetting if d < 2, theta is outside [0, pi/2] or either
    /// angle is not finite. Any finite phi is accepted and wrapped.
    static ControlSetting make(int d, double theta, double phi);

    int d() const noexcept {
        return d_;
    }
    double theta() const noexcept {
        return theta_;
    }
    double phi() const noexcept {
        return phi_;
    }

    bool operator==(const ControlSetting &) const = default;

   private:
    ControlSetting(int d, double theta, double phi) : d_(d), theta_(theta), phi_(phi) {
    }
    int d_;
    double theta_;
    double phi_;
};

/// Post-selected operators S(a,1) and their complements S(a,0) for one
/// setting and one measured basis.
struct KrausSet {
    ControlSetting setting;
    Observable basis_a;
    std::vector<ComplexMatrix> success_ops;
    std::vector<ComplexMatrix> failure_ops;
};

/// E(a) = (1/sqrt d) I (x) |0><0| + |a><a| (x) |1><1| on system (x) control,
/// control index slowest: row/column index = control * d + system.
ComplexMatrix build_interaction_operator(const Observable &basis_a, int a);

/// S(a,1) = (1/sqrt 2) ((cos t / sqrt d) I + e^{i phi} sin t |a><a|)
/// S(a,0) = (1/sqrt 2) ((sin t / sqrt d) I - e^{i phi} cos t |a><a|)
///
/// S(a,1) post-selects the control on cos t |0> + e^{-i phi} sin t |1>, and
/// S(a,0) on the orthogonal state sin t |0> - e^{-i phi} cos t |1>.
KrausSet build_kraus_set(const Observable &basis_a, const ControlSetting &setting);

/// P(1) = (1 + (2/sqrt d) sin t cos t cos phi) / 2, independent of the input state.
double success_probability(const ControlSetting &setting);

/// Probability of reading out a correctly for an eigenstate input:
/// F = 1 - (d - 1) cos^2 t / (2 d P(1)).
double measurement_fidelity(const ControlSetting &setting);

/// eta = 1 - sin^2 t / (2 P(1)).
double dephasing_factor(const ControlSetting &setting);

/// Output state after a successful post-selection when the outcome a is
/// discarded: (1/P(1)) sum_a S(a,1) rho S(a,1)^dagger.
DensityMatrix apply_nonselective(const DensityMatrix &state, const KrausSet &kraus);

}  // namespace qcm
