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
#include <string>
#include <string_view>
#include <vector>

#include "qcm/measurement.hpp"
#include "qcm/quantum_core.hpp"
#include "qcm/statistics.hpp"

namespace qcm {

using CountMatrix = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Probabilities of every (a, control outcome, b) triple, indexed (a, b).
struct OutcomeDistribution {
    ControlSetting setting;
    RealMatrix success;
    RealMatrix failure;

    double total() const {
        return success.sum() + failure.sum();
    }
    /// Probabilities in sampling order: a-major, then control (success
    /// before failure), then b.
    std::vector<double> flattened() const;
};

/// Pr(a, 1, b) = <b|S(a,1) rho S(a,1)^dagger|b>, Pr(a, 0, b) likewise with S(a,0).
OutcomeDistribution outcome_distribution(const DensityMatrix &state, const ObservablePair &pair,
                                         const ControlSetting &setting);

struct ExperimentPlan {
    DensityMatrix state;
    ObservablePair pair;
    std::vector<ControlSetting> settings;
    int64_t shots_per_setting = 1;
    uint64_t seed = 0;

    /// Throws InvalidPlan on an empty setting list, non-positive shot count
    /// or inconsistent dimensions.
    void validate() const;
};

struct CountHistogram {
    ControlSetting setting;
    CountMatrix success_counts;
    CountMatrix failure_counts;
    int64_t total_shots = 0;

    int64_t success_total() const {
        return success_counts.sum();
    }
    /// Adds the counts of another histogram taken at the same setting.
    CountHistogram &operator+=(const CountHistogram &other);
    bool operator==(const CountHistogram &other) const;
};

/// Draws `shots` i.i.d. outcomes by inverse CDF over the flattened category
/// list, using qcm::Rng(seed).
CountHistogram sample_histogram(const OutcomeDistribution &dist, int64_t shots, uint64_t seed);

/// One histogram per setting, in plan order. Setting i is sampled from
/// qcm::Rng(sub_seed(plan.seed, i)), so the result does not depend on
/// `threads`.
std::vector<CountHistogram> run_experiment(const ExperimentPlan &plan, int threads = 1);

/// Success counts normalized to frequencies; success_prob() is the empirical
/// success fraction. Throws NoSuccessfulPostSelections on zero successes.
JointOutcomeTable empirical_joint(const CountHistogram &hist);

/// CSV with header `setting_index,theta,phi,a,b,control,count`; control is 1
/// for a successful post-selection and 0 otherwise. Rows follow the sampling
/// order within each setting.
std::string histograms_to_csv(const std::vector<CountHistogram> &hists);

/// JSON array of {"setting_index", "d", "theta", "phi", "total_shots",
/// "success_counts", "failure_counts"} with count tables as nested row arrays.
std::string histograms_to_json(const std::vector<CountHistogram> &hists);
std::vector<CountHistogram> histograms_from_json(std::string_view text);

}  // namespace qcm
