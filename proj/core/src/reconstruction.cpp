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

#include "qcm/reconstruction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "json_util.hpp"
#include "qcm/format.hpp"
#include "qcm/rng.hpp"
#include "qcm/sampler.hpp"

namespace qcm {

namespace {

using nlohmann::json;

constexpr double kDegenerateWeight = 1e-9;
constexpr double kTanSeparation = 1e-9;
constexpr double kGridTolerance = 1e-9;
constexpr double kMinFourierConstant = 1e-12;

void check_table(const JointOutcomeTable &table, const RealMatrix &overlaps) {
    const int d = table.d();
    if (overlaps.rows() != d || overlaps.cols() != d) {
        throw Error(ErrorCode::DimensionMismatch, "overlap table must be " + std::to_string(d) + "x" +
                                                      std::to_string(d));
    }
}

json complex_table(const ComplexMatrix &m) {
    json re = json::array();
    json im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    }
    return {{"re", re}, {"im", im}};
}

json real_table(const RealMatrix &m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out.push_back(m(r, c));
        }
    }
    return out;
}

}  // namespace

IntrinsicDistribution subtract_background(const JointOutcomeTable &table, const QuasiProbTriple &triple,
                                          const RealVector &marg_a, const RealVector &marg_b,
                                          const RealMatrix &overlaps) {
    check_table(table, overlaps);
    const int d = table.d();
    if (marg_a.size() != d || marg_b.size() != d) {
        throw Error(ErrorCode::DimensionMismatch, "marginals must have length " + std::to_string(d));
    }
    if (std::abs(triple.p_coherence) <= kMinCoherenceWeight) {
        throw Error(ErrorCode::CoherenceWeightTooSmall,
                    "|P_C| = " + std::to_string(std::abs(triple.p_coherence)) + " <= 1e-6");
    }
    RealMatrix values(d, d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const double background =
                triple.p_identity * marg_b(b) / d + triple.p_measurement * overlaps(b, a) * marg_a(a);
            values(a, b) = (table(a, b) - background) / triple.p_coherence;
        }
    }
    return IntrinsicDistribution{d, std::move(values), table.setting().phi()};
}

Marginals recover_marginals(const JointOutcomeTable &table, const QuasiProbTriple &triple,
                            const RealMatrix &overlaps) {
    check_table(table, overlaps);
    if (std::abs(1.0 - triple.p_identity) <= kDegenerateWeight) {
        throw Error(ErrorCode::DegenerateDecomposition, "P_I = 1: the A outcomes carry no information");
    }
    if (std::abs(1.0 - triple.p_measurement) <= kDegenerateWeight) {
        throw Error(ErrorCode::DegenerateDecomposition, "P_M = 1: the B marginal is fully disturbed");
    }
    const int d = table.d();
    const RealMatrix &p = table.probs();
    RealVector marg_a = (p.rowwise().sum().array() - triple.p_identity / d) / (1.0 - triple.p_identity);
    RealVector marg_b(d);
    for (int b = 0; b < d; ++b) {
        double sum = 0.0;
        for (int a = 0; a < d; ++a) {
            sum += p(a, b) - triple.p_measurement * overlaps(b, a) * marg_a(a);
        }
        marg_b(b) = sum / (1.0 - triple.p_measurement);
    }
    return Marginals{std::move(marg_a), std::move(marg_b)};
}

IntrinsicDistribution extract_intrinsic(const JointOutcomeTable &table, const ObservablePair &pair) {
    if (table.d() != pair.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "table and observables have different dimensions");
    }
    const QuasiProbTriple triple = decompose(table.setting());
    const RealMatrix overlaps = pair.overlap_probabilities();
    const Marginals marginals = recover_marginals(table, triple, overlaps);
    return subtract_background(table, triple, marginals.a, marginals.b, overlaps);
}

ComplexJointDistribution combine_two_phases(const IntrinsicDistribution &first, const IntrinsicDistribution &second,
                                            const ObservablePair &pair) {
    if (first.d != second.d || first.d != pair.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "intrinsic distributions and observables must share d");
    }
    const double t1 = std::tan(first.phi);
    const double t2 = std::tan(second.phi);
    if (!(std::abs(t1 - t2) > kTanSeparation)) {
        throw Error(ErrorCode::PhasesNotIndependent, "tan(phi) = " + std::to_string(t1) + " and " +
                                                         std::to_string(t2) + " do not determine Re and Im");
    }
    // v1 = R - t1 I, v2 = R - t2 I.
    const RealMatrix imag = (first.values - second.values) / (t2 - t1);
    const RealMatrix real = first.values + t1 * imag;
    ComplexMatrix values(first.d, first.d);
    values.real() = real;
    values.imag() = imag;
    return ComplexJointDistribution{std::move(values), pair};
}

double fourier_constant(double theta, int d) {
    return std::sin(theta) * std::cos(theta) / (2.0 * std::sqrt(static_cast<double>(d)));
}

ComplexMatrix fourier_coefficient(const std::vector<JointOutcomeTable> &tables) {
    const size_t k_count = tables.size();
    if (k_count < 4) {
        throw Error(ErrorCode::NonUniformPhaseGrid, "a phase scan needs at least 4 phases, got " +
                                                        std::to_string(k_count));
    }
    const int d = tables.front().d();
    const double theta = tables.front().setting().theta();
    std::vector<double> phases;
    phases.reserve(k_count);
    for (const auto &t : tables) {
        if (t.d() != d || std::abs(t.setting().theta() - theta) > kGridTolerance) {
            throw Error(ErrorCode::NonUniformPhaseGrid, "all scan tables must share d and theta");
        }
        phases.push_back(t.setting().phi());
    }
    std::sort(phases.begin(), phases.end());
    const double step = 2.0 * std::numbers::pi / static_cast<double>(k_count);
    for (size_t k = 0; k < k_count; ++k) {
        // Consecutive gaps, including the wrap from the last phase back to the first.
        const double next = k + 1 < k_count ? phases[k + 1] : phases[0] + 2.0 * std::numbers::pi;
        if (std::abs(next - phases[k] - step) > kGridTolerance) {
            throw Error(ErrorCode::NonUniformPhaseGrid,
                        "phases are not uniformly spaced by 2 pi / " + std::to_string(k_count));
        }
    }

    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto &t : tables) {
        const Complex weight = std::polar(1.0, -t.setting().phi());
        sum += t.unconditioned().cast<Complex>() * weight;
    }
    return sum / static_cast<double>(k_count);
}

ComplexJointDistribution fourier_extract(const std::vector<JointOutcomeTable> &tables, const ObservablePair &pair) {
    ComplexMatrix coefficient = fourier_coefficient(tables);
    if (tables.front().d() != pair.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "tables and observables have different dimensions");
    }
    const double constant = fourier_constant(tables.front().setting().theta(), pair.dim());
    if (constant < kMinFourierConstant) {
        throw Error(ErrorCode::DegenerateStrength, "sin(theta) cos(theta) vanishes; the phase scan has no visibility");
    }
    return ComplexJointDistribution{coefficient / constant, pair};
}

ComplexMatrix invert_complex_joint(const ComplexJointDistribution &dist) {
    const ObservablePair &pair = dist.pair;
    if (dist.d() != pair.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "distribution and observables have different dimensions");
    }
    if (!pair.fully_overlapping()) {
        std::ostringstream msg;
        msg << "min |<b|a>| = " << pair.min_overlap() << " <= 1e-9; the state is not reconstructible in these bases";
        throw Error(ErrorCode::VanishingOverlap, msg.str());
    }
    // mixed(a, b) = <a|rho|b> = rho(a,b) / <b|a>
    const ComplexMatrix mixed = dist.values.cwiseQuotient(pair.overlaps().transpose());
    return pair.obs_a().eigenvectors() * mixed * pair.obs_b().eigenvectors().adjoint();
}

DensityMatrix tomography(const ComplexJointDistribution &dist) {
    const ComplexMatrix raw = invert_complex_joint(dist);
    const ComplexMatrix hermitian = 0.5 * (raw + raw.adjoint());
    try {
        return validate_state(hermitian);
    } catch (const Error &e) {
        double distance = 0.0;
        DensityMatrix nearest = symmetrize_and_project(hermitian, &distance);
        throw StateValidationError(std::string("reconstructed matrix is not a valid state (") + e.what() + ")",
                                   std::move(nearest), distance);
    }
}

ProjectedState tomography_projected(const ComplexJointDistribution &dist) {
    const ComplexMatrix raw = invert_complex_joint(dist);
    double distance = 0.0;
    DensityMatrix state = symmetrize_and_project(raw, &distance);
    return ProjectedState{std::move(state), distance};
}

std::string_view method_name(ReconstructionMethod method) {
    switch (method) {
        case ReconstructionMethod::TwoPhase:
            return "two-phase";
        case ReconstructionMethod::FourierScan:
            return "fourier-scan";
        case ReconstructionMethod::Exact:
            return "exact";
    }
    return "unknown";
}

std::optional<ReconstructionMethod> parse_method(std::string_view name) {
    if (name == "two-phase") {
        return ReconstructionMethod::TwoPhase;
    }
    if (name == "fourier-scan" || name == "fourier") {
        return ReconstructionMethod::FourierScan;
    }
    if (name == "exact") {
        return ReconstructionMethod::Exact;
    }
    return std::nullopt;
}

ReconstructionReport make_report(const ComplexJointDistribution &dist, ReconstructionMethod method,
                                 const std::optional<DensityMatrix> &truth) {
    ProjectedState projected = tomography_projected(dist);
    const ComplexJointDistribution implied = complex_joint_probability(projected.state, dist.pair);
    RealMatrix residuals = (implied.values - dist.values).cwiseAbs();
    const double max_residual = residuals.maxCoeff();
    const double rms_residual = std::sqrt(residuals.squaredNorm() / static_cast<double>(residuals.size()));
    std::optional<double> to_truth;
    if (truth) {
        to_truth = trace_distance(projected.state, *truth);
    }
    return ReconstructionReport{dist,         std::move(projected.state), std::move(residuals),
                                max_residual, rms_residual,               projected.projection_distance,
                                to_truth,     method};
}

std::string report_to_json(const ReconstructionReport &report) {
    json doc = {
        {"method", std::string(method_name(report.method))},
        {"d", report.complex_joint.d()},
        {"complex_joint", complex_table(report.complex_joint.values)},
        {"state", complex_table(report.reconstructed_state.matrix())},
        {"residuals", real_table(report.residuals)},
        {"max_residual", report.max_residual},
        {"rms_residual", report.rms_residual},
        {"projection_distance", report.projection_distance},
    };
    if (report.trace_distance_to_truth) {
        doc["trace_distance_to_truth"] = *report.trace_distance_to_truth;
    }
    return dump_json(doc);
}

ComplexJointDistribution reconstruct_two_phase(const JointOutcomeTable &first, const JointOutcomeTable &second,
                                               const ObservablePair &pair) {
    return combine_two_phases(extract_intrinsic(first, pair), extract_intrinsic(second, pair), pair);
}

std::vector<SnrRow> snr_summary(const SnrRequest &request) {
    if (request.thetas.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "an SNR comparison needs at least two theta values");
    }
    if (request.seeds < 10) {
        throw Error(ErrorCode::InvalidArgument, "an SNR comparison needs at least 10 seeds, got " +
                                                    std::to_string(request.seeds));
    }
    if (request.post_selected_events && *request.post_selected_events < 1) {
        throw Error(ErrorCode::InvalidArgument, "post-selected events must be >= 1");
    }
    const int d = request.pair.dim();
    const RealMatrix truth = complex_joint_probability(request.state, request.pair).values.real();
    std::vector<double> thetas = request.thetas;
    std::sort(thetas.begin(), thetas.end());

    const size_t seeds = static_cast<size_t>(request.seeds);
    const size_t jobs = thetas.size() * seeds;
    std::vector<double> rms(jobs, 0.0);

    auto run_job = [&](size_t job) {
        const double theta = thetas[job / seeds];
        const size_t seed_index = job % seeds;
        const ControlSetting first = ControlSetting::make(d, theta, request.phases.first);
        const ControlSetting second = ControlSetting::make(d, theta, request.phases.second);
        ComplexJointDistribution estimate = [&] {
            if (!request.post_selected_events) {
                return reconstruct_two_phase(exact_joint_probability(request.state, request.pair, first),
                                             exact_joint_probability(request.state, request.pair, second),
                                             request.pair);
            }
            // Both phases share cos^2 phi, hence P(1), at the default +-pi/4;
            // the larger shot count keeps the expected events per phase >= target.
            const double p1 = std::min(success_probability(first), success_probability(second));
            const auto shots = static_cast<int64_t>(std::ceil(static_cast<double>(*request.post_selected_events) / p1));
            ExperimentPlan plan{request.state, request.pair, {first, second}, shots,
                                sub_seed(request.base_seed, seed_index)};
            const std::vector<CountHistogram> hists = run_experiment(plan);
            return reconstruct_two_phase(empirical_joint(hists[0]), empirical_joint(hists[1]), request.pair);
        }();
        const RealMatrix diff = estimate.values.real() - truth;
        rms[job] = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
    };

    const size_t workers = std::min(jobs, static_cast<size_t>(std::max(request.threads, 1)));
    if (workers <= 1) {
        for (size_t job = 0; job < jobs; ++job) {
            run_job(job);
        }
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (size_t job = next++; job < jobs; job = next++) {
                            run_job(job);
                        }
                    } catch (...) {
                        errors[w] = std::current_exception();
                        next = jobs;
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

    std::vector<SnrRow> rows;
    rows.reserve(thetas.size());
    for (size_t t = 0; t < thetas.size(); ++t) {
        const auto begin = rms.begin() + static_cast<std::ptrdiff_t>(t * seeds);
        const auto end = begin + static_cast<std::ptrdiff_t>(seeds);
        const double mean = std::accumulate(begin, end, 0.0) / static_cast<double>(seeds);
        double var = 0.0;
        for (auto it = begin; it != end; ++it) {
            var += (*it - mean) * (*it - mean);
        }
        var /= static_cast<double>(seeds - 1);
        rows.push_back(SnrRow{thetas[t], mean, std::sqrt(var / static_cast<double>(seeds))});
    }
    return rows;
}

std::string snr_to_csv(const std::vector<SnrRow> &rows) {
    std::ostringstream out;
    out << "theta,rms_error,stderr\n";
    for (const auto &row : rows) {
        out << format_double(row.theta) << ',' << format_double(row.rms_error) << ',' << format_double(row.standard_error)
            << '\n';
    }
    return out.str();
}

}  // namespace qcm
