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

#include "qcm/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "json_util.hpp"
#include "qcm/error.hpp"
#include "qcm/format.hpp"
#include "qcm/rng.hpp"

namespace qcm {

namespace {

using nlohmann::json;

json count_rows(const CountMatrix &m) {
    json rows = json::array();
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
        json row = json::array();
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
            row.push_back(m(a, b));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CountMatrix count_matrix(const json &rows, int d, const char *field) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != d) {
        throw Error(ErrorCode::InvalidArgument, std::string("histogram field '") + field + "' must have " +
                                                    std::to_string(d) + " rows");
    }
    CountMatrix m(d, d);
    for (int a = 0; a < d; ++a) {
        if (!rows[a].is_array() || static_cast<int>(rows[a].size()) != d) {
            throw Error(ErrorCode::InvalidArgument, std::string("histogram field '") + field + "' row " +
                                                        std::to_string(a) + " must have " + std::to_string(d) +
                                                        " entries");
        }
        for (int b = 0; b < d; ++b) {
            m(a, b) = rows[a][b].get<int64_t>();
            if (m(a, b) < 0) {
                throw Error(ErrorCode::InvalidArgument, std::string("negative count in '") + field + "'");
            }
        }
    }
    return m;
}

}  // namespace

std::vector<double> OutcomeDistribution::flattened() const {
    const auto d = success.rows();
    std::vector<double> out;
    out.reserve(static_cast<size_t>(2 * d * d));
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            out.push_back(success(a, b));
        }
        for (Eigen::Index b = 0; b < d; ++b) {
            out.push_back(failure(a, b));
        }
    }
    return out;
}

OutcomeDistribution outcome_distribution(const DensityMatrix &state, const ObservablePair &pair,
                                         const ControlSetting &setting) {
    if (state.dim() != pair.dim() || setting.d() != pair.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state, observables and setting must share d");
    }
    const int d = pair.dim();
    const KrausSet kraus = build_kraus_set(pair.obs_a(), setting);
    const ComplexMatrix &ub = pair.obs_b().eigenvectors();
    OutcomeDistribution dist{setting, RealMatrix(d, d), RealMatrix(d, d)};
    for (int a = 0; a < d; ++a) {
        const ComplexMatrix &s1 = kraus.success_ops[a];
        const ComplexMatrix &s0 = kraus.failure_ops[a];
        dist.success.row(a) =
            (ub.adjoint() * s1 * state.matrix() * s1.adjoint() * ub).diagonal().real().transpose();
        dist.failure.row(a) =
            (ub.adjoint() * s0 * state.matrix() * s0.adjoint() * ub).diagonal().real().transpose();
    }
    // Roundoff can leave entries at -1e-17; they are probabilities.
    dist.success = dist.success.cwiseMax(0.0);
    dist.failure = dist.failure.cwiseMax(0.0);
    return dist;
}

void ExperimentPlan::validate() const {
    if (settings.empty()) {
        throw Error(ErrorCode::InvalidPlan, "experiment plan has no settings");
    }
    if (shots_per_setting < 1) {
        throw Error(ErrorCode::InvalidPlan, "shots_per_setting must be >= 1, got " + std::to_string(shots_per_setting));
    }
    if (state.dim() != pair.dim()) {
        throw Error(ErrorCode::InvalidPlan, "state and observables have different dimensions");
    }
    for (size_t i = 0; i < settings.size(); ++i) {
        if (settings[i].d() != pair.dim()) {
            throw Error(ErrorCode::InvalidPlan, "setting " + std::to_string(i) + " has d = " +
                                                    std::to_string(settings[i].d()) + ", expected " +
                                                    std::to_string(pair.dim()));
        }
    }
}

CountHistogram &CountHistogram::operator+=(const CountHistogram &other) {
    if (!(setting == other.setting)) {
        throw Error(ErrorCode::InvalidArgument, "cannot merge histograms taken at different settings");
    }
    success_counts += other.success_counts;
    failure_counts += other.failure_counts;
    total_shots += other.total_shots;
    return *this;
}

bool CountHistogram::operator==(const CountHistogram &other) const {
    return setting == other.setting && total_shots == other.total_shots &&
           success_counts == other.success_counts && failure_counts == other.failure_counts;
}

CountHistogram sample_histogram(const OutcomeDistribution &dist, int64_t shots, uint64_t seed) {
    const int d = dist.setting.d();
    const std::vector<double> probs = dist.flattened();
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    const double total = cdf.back();
    for (double &c : cdf) {
        c /= total;
    }
    size_t last_positive = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) {
            last_positive = i;
        }
    }

    std::vector<int64_t> counts(probs.size(), 0);
    Rng rng(seed);
    for (int64_t shot = 0; shot < shots; ++shot) {
        const double u = rng.uniform();
        auto idx = static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (idx >= cdf.size()) {
            idx = last_positive;
        }
        ++counts[idx];
    }

    CountHistogram hist{dist.setting, CountMatrix::Zero(d, d), CountMatrix::Zero(d, d), shots};
    size_t idx = 0;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            hist.success_counts(a, b) = counts[idx++];
        }
        for (int b = 0; b < d; ++b) {
            hist.failure_counts(a, b) = counts[idx++];
        }
    }
    return hist;
}

std::vector<CountHistogram> run_experiment(const ExperimentPlan &plan, int threads) {
    plan.validate();
    const size_t n = plan.settings.size();
    std::vector<std::optional<CountHistogram>> slots(n);
    auto work = [&](size_t i) {
        const OutcomeDistribution dist = outcome_distribution(plan.state, plan.pair, plan.settings[i]);
        slots[i] = sample_histogram(dist, plan.shots_per_setting, sub_seed(plan.seed, i));
    };

    const size_t workers = std::min(n, static_cast<size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) {
            work(i);
        }
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (size_t i = next++; i < n; i = next++) {
                            work(i);
                        }
                    } catch (...) {
                        errors[w] = std::current_exception();
                        next = n;
                    }
                });
            }
        }
        for (const auto &e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    std::vector<CountHistogram> out;
    out.reserve(n);
    for (auto &slot : slots) {
        out.push_back(std::move(*slot));
    }
    return out;
}

JointOutcomeTable empirical_joint(const CountHistogram &hist) {
    const int64_t successes = hist.success_total();
    if (successes == 0) {
        throw Error(ErrorCode::NoSuccessfulPostSelections,
                    "histogram with " + std::to_string(hist.total_shots) + " shots has no successful post-selection");
    }
    RealMatrix freq = hist.success_counts.cast<double>() / static_cast<double>(successes);
    const double success_fraction =
        hist.total_shots > 0 ? static_cast<double>(successes) / static_cast<double>(hist.total_shots) : 1.0;
    return JointOutcomeTable::make(std::move(freq), success_fraction, hist.setting);
}

std::string histograms_to_csv(const std::vector<CountHistogram> &hists) {
    std::ostringstream out;
    out << "setting_index,theta,phi,a,b,control,count\n";
    for (size_t i = 0; i < hists.size(); ++i) {
        const CountHistogram &h = hists[i];
        const int d = h.setting.d();
        const std::string prefix =
            std::to_string(i) + "," + format_double(h.setting.theta()) + "," + format_double(h.setting.phi()) + ",";
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                out << prefix << a << ',' << b << ",1," << h.success_counts(a, b) << '\n';
            }
            for (int b = 0; b < d; ++b) {
                out << prefix << a << ',' << b << ",0," << h.failure_counts(a, b) << '\n';
            }
        }
    }
    return out.str();
}

std::string histograms_to_json(const std::vector<CountHistogram> &hists) {
    json doc = json::array();
    for (size_t i = 0; i < hists.size(); ++i) {
        const CountHistogram &h = hists[i];
        doc.push_back({
            {"setting_index", i},
            {"d", h.setting.d()},
            {"theta", h.setting.theta()},
            {"phi", h.setting.phi()},
            {"total_shots", h.total_shots},
            {"success_counts", count_rows(h.success_counts)},
            {"failure_counts", count_rows(h.failure_counts)},
        });
    }
    return dump_json(doc);
}

std::vector<CountHistogram> histograms_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::InvalidArgument, std::string("histogram JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw Error(ErrorCode::InvalidArgument, "histogram JSON must be an array");
    }
    std::vector<CountHistogram> out;
    for (const auto &item : doc) {
        try {
            const int d = item.at("d").get<int>();
            const ControlSetting setting =
                ControlSetting::make(d, item.at("theta").get<double>(), item.at("phi").get<double>());
            CountHistogram h{setting, count_matrix(item.at("success_counts"), d, "success_counts"),
                             count_matrix(item.at("failure_counts"), d, "failure_counts"),
                             item.at("total_shots").get<int64_t>()};
            if (h.success_counts.sum() + h.failure_counts.sum() != h.total_shots) {
                throw Error(ErrorCode::InvalidArgument, "histogram counts do not add up to total_shots");
            }
            out.push_back(std::move(h));
        } catch (const json::exception &e) {
            throw Error(ErrorCode::InvalidArgument, std::string("histogram JSON: ") + e.what());
        }
    }
    return out;
}

}  // namespace qcm
