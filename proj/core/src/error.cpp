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

#include "qcm/error.hpp"

namespace qcm {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotHermitian:
            return "NotHermitian";
        case ErrorCode::TraceNotOne:
            return "TraceNotOne";
        case ErrorCode::NotPositive:
            return "NotPositive";
        case ErrorCode::NotSquare:
            return "NotSquare";
        case ErrorCode::NotOrthonormal:
            return "NotOrthonormal";
        case ErrorCode::DimensionMismatch:
            return "DimensionMismatch";
        case ErrorCode::IndexOutOfRange:
            return "IndexOutOfRange";
        case ErrorCode::InvalidSetting:
            return "InvalidSetting";
        case ErrorCode::PhaseSingularity:
            return "PhaseSingularity";
        case ErrorCode::NegativeProbability:
            return "NegativeProbability";
        case ErrorCode::NotNormalized:
            return "NotNormalized";
        case ErrorCode::InvalidPlan:
            return "InvalidPlan";
        case ErrorCode::NoSuccessfulPostSelections:
            return "NoSuccessfulPostSelections";
        case ErrorCode::CoherenceWeightTooSmall:
            return "CoherenceWeightTooSmall";
        case ErrorCode::DegenerateDecomposition:
            return "DegenerateDecomposition";
        case ErrorCode::PhasesNotIndependent:
            return "PhasesNotIndependent";
        case ErrorCode::NonUniformPhaseGrid:
            return "NonUniformPhaseGrid";
        case ErrorCode::DegenerateStrength:
            return "DegenerateStrength";
        case ErrorCode::VanishingOverlap:
            return "VanishingOverlap";
        case ErrorCode::StateValidationFailed:
            return "StateValidationFailed";
        case ErrorCode::InvalidArgument:
            return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {
}

}  // namespace qcm
