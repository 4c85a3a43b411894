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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace qcm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// An extra file written next to the main output, named by inserting
/// `suffix` before the extension of the output path.
struct ExtraOutput {
    std::string suffix;
    std::string content;
};

struct CommandResult {
    std::string main;
    std::vector<ExtraOutput> extras;
    /// One-line human summary for stderr (suppressed by --quiet).
    std::string summary;
};

/// P(1), F, eta, the quasi-probability triple, p(a,b|1) and rho(a,b) for
/// every (theta, phi) pair in the config.
CommandResult cmd_exact(const ExperimentConfig &config);

/// Sampled histograms for every (theta, phi) pair plus the empirical
/// conditional tables. Requires `shots`.
CommandResult cmd_sample(const ExperimentConfig &config, int threads = 1);

/// Reconstruction report from exact statistics (no shots), sampled
/// statistics (shots) or a histogram document produced by `sample`.
CommandResult cmd_reconstruct(const ExperimentConfig &config, const std::optional<std::string> &histogram_json,
                              int threads = 1);

/// `theta,rms_error,stderr` table; `shots` is the post-selected event count
/// per phase and seed.
CommandResult cmd_snr(const ExperimentConfig &config, int threads = 1);

/// Full command-line entry point. Returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// `path` with `suffix` inserted before its extension.
std::string sibling_path(const std::string &path, const std::string &suffix);

}  // namespace qcm::cli
