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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcm/quantum_core.hpp"
#include "qcm/reconstruction.hpp"

namespace qcm::cli {

enum class OutputFormat { Csv, Json };

std::string_view format_name(OutputFormat format);
std::optional<OutputFormat> parse_format(std::string_view name);

/// Raised for malformed or inconsistent configs. `field` is a dotted path
/// such as "state.re[1]" (empty for syntax errors, whose message carries the
/// line and column instead).
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string field, const std::string &message);
    const std::string &field() const noexcept {
        return field_;
    }

   private:
    std::string field_;
};

/// Radians as a number, or strings such as "pi/4", "-pi/4", "3pi/8",
/// "2*pi/3", "pi" and "0.25". Throws std::invalid_argument.
double parse_angle(std::string_view text);

/// A state or basis given by preset name, explicit matrix or random seed.
struct MatrixSpec {
    enum class Kind { Preset, Explicit, Random };
    Kind kind = Kind::Preset;
    std::string preset;
    ComplexMatrix matrix;
    uint64_t seed = 0;

    friend bool operator==(const MatrixSpec &x, const MatrixSpec &y);
};

struct ExperimentConfig {
    int dimension = 2;
    /// Optional only for `reconstruct` from histogram files.
    std::optional<MatrixSpec> state;
    MatrixSpec basis_a;
    MatrixSpec basis_b;
    std::optional<RealVector> eigenvalues_a;
    std::optional<RealVector> eigenvalues_b;
    std::vector<double> theta;
    std::vector<double> phi{0.0};
    std::optional<int64_t> shots;
    uint64_t seed = 0;
    OutputFormat format = OutputFormat::Json;
    std::optional<std::string> output;
    ReconstructionMethod method = ReconstructionMethod::TwoPhase;
    int seeds = 10;

    friend bool operator==(const ExperimentConfig &x, const ExperimentConfig &y);
};

/// Parses and validates a JSON config document. Unknown fields are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string &path);

/// JSON document that parse_config reads back to an equal config.
std::string config_to_json(const ExperimentConfig &config);

/// Throws ConfigError naming the offending field when the spec does not
/// produce a valid state or basis.
DensityMatrix build_state(const ExperimentConfig &config);
ObservablePair build_pair(const ExperimentConfig &config);

}  // namespace qcm::cli
