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

#include "qcm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qcm/error.hpp"

namespace qcm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kAngleSlack = 1e-12;

}  // namespace

ControlSetting ControlSetting::make(int d, double theta, double phi) {
    if (d < 2) {
        throw Error(ErrorCode::InvalidSetting, "d must be >= 2, got " + std::to_string(d));
    }
    if (!std::isfinite(theta) || theta < -kAngleSlack || theta > kHalfPi + kAngleSlack) {
        throw Error(ErrorCode::InvalidSetting, "theta = " + std::to_string(theta) + " outside [0, pi/2]");
    }
    if (!std::isfinite(phi)) {
        throw Error(ErrorCode::InvalidSetting, "phi must be finite");
    }
    theta = std::clamp(theta, 0.0, kHalfPi);
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) {
        phi += kTwoPi;
    }
    if (phi >= kTwoPi) {
        phi = 0.0;
    }
    return ControlSetting(d, theta, phi);
}

ComplexMatrix build_interaction_operator(const Observable &basis_a, int a) {
    const int d = basis_a.dim();
    if (a < 0 || a >= d) {
        throw Error(ErrorCode::IndexOutOfRange, "outcome index " + std::to_string(a) + " outside [0, " +
                                                    std::to_string(d) + ")");
    }
    ComplexMatrix e = ComplexMatrix::Zero(2 * d, 2 * d);
    e.topLeftCorner(d, d) = ComplexMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d));
    e.bottomRightCorner(d, d) = basis_a.projector(a);
    return e;
}

KrausSet build_kraus_set(const Observable &basis_a, const ControlSetting &setting) {
    const int d = setting.d();
    if (basis_a.dim() != d) {
        throw Error(ErrorCode::DimensionMismatch, "basis has dimension " + std::to_string(basis_a.dim()) +
                                                      ", setting has d = " + std::to_string(d));
    }
    const double c = std::cos(setting.theta());
    const double s = std::sin(setting.theta());
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    const double inv_sqrt_2 = 1.0 / std::numbers::sqrt2;
    const Complex phase = std::polar(1.0, setting.phi());
    const ComplexMatrix identity = ComplexMatrix::Identity(d, d);

    KrausSet kraus{setting, basis_a, {}, {}};
    kraus.success_ops.reserve(d);
    kraus.failure_ops.reserve(d);
    for (int a = 0; a < d; ++a) {
        const ComplexMatrix projector = basis_a.projector(a);
        kraus.success_ops.push_back(inv_sqrt_2 * (c * inv_sqrt_d * identity + phase * s * projector));
        kraus.failure_ops.push_back(inv_sqrt_2 * (s * inv_sqrt_d * identity - phase * c * projector));
    }
    return kraus;
}

double success_probability(const ControlSetting &setting) {
    const double t = setting.theta();
    const double d = setting.d();
    return 0.5 * (1.0 + (2.0 / std::sqrt(d)) * std::sin(t) * std::cos(t) * std::cos(setting.phi()));
}

double measurement_fidelity(const ControlSetting &setting) {
    const double d = setting.d();
    const double c = std::cos(setting.theta());
    return 1.0 - (d - 1.0) / (2.0 * d * success_probability(setting)) * c * c;
}

double dephasing_factor(const ControlSetting &setting) {
    const double s = std::sin(setting.theta());
    return 1.0 - s * s / (2.0 * success_probability(setting));
}

DensityMatrix apply_nonselective(const DensityMatrix &state, const KrausSet &kraus) {
    const int d = state.dim();
    if (d != kraus.setting.d()) {
        throw Error(ErrorCode::DimensionMismatch, "state has dimension " + std::to_string(d) +
                                                      ", Kraus set has d = " + std::to_string(kraus.setting.d()));
    }
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto &op : kraus.success_ops) {
        out += op * state.matrix() * op.adjoint();
    }
    out /= success_probability(kraus.setting);
    return validate_state(out);
}

}  // namespace qcm
