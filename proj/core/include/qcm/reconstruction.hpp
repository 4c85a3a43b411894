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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcm/error.hpp"
#include "qcm/measurement.hpp"
#include "qcm/quantum_core.hpp"
#include "qcm/statistics.hpp"

namespace qcm {

/// Background-subtracted joint distribution at one control phase:
/// values(a, b) = Re(e^{i phi} rho(a,b)) / cos phi = Re rho(a,b) - tan phi Im rho(a,b).
struct IntrinsicDistribution {
    int d = 0;
    RealMatrix values;
    double phi = 0.0;

    RealVector marginal_a() const {
        return values.rowwise().sum();
    }
    RealVector marginal_b() const {
        return values.colwise().sum().transpose();
    }
};

struct Marginals {
    RealVector a;
    RealVector b;
};

/// |P_C| at or below this makes background subtraction refuse.
inline constexpr double kMinCoherenceWeight = 1e-6;

/// values = (p(a,b|1) - P_I marg_b[b] / d - P_M overlaps(b, a) marg_a[a]) / P_C,
/// where overlaps(b, a) = |<b|a>|^2. Throws CoherenceWeightTooSmall if
/// |P_C| <= 1e-6.
IntrinsicDistribution subtract_background(const JointOutcomeTable &table, const QuasiProbTriple &triple,
                                          const RealVector &marg_a, const RealVector &marg_b,
                                          const RealMatrix &overlaps);

/// Basis probabilities of A and B recovered from the marginals of p(a,b|1).
/// Throws DegenerateDecomposition when P_I or P_M is 1.
Marginals recover_marginals(const JointOutcomeTable &table, const QuasiProbTriple &triple, const RealMatrix &overlaps);

/// decompose + recover_marginals + subtract_background for one table.
IntrinsicDistribution extract_intrinsic(const JointOutcomeTable &table, const ObservablePair &pair);

/// Solves values(phi) = Re rho - tan(phi) Im rho entrywise from two phases.
/// Throws PhasesNotIndependent if tan phi_1 == tan phi_2.
ComplexJointDistribution combine_two_phases(const IntrinsicDistribution &first, const IntrinsicDistribution &second,
                                            const ObservablePair &pair);

/// (1/K) sum_k p(a,b|phi_k) P(phi_k) e^{-i phi_k} over a uniform phase grid.
/// Equals sin t cos t / (2 sqrt d) * rho(a,b) for K >= 4.
ComplexMatrix fourier_coefficient(const std::vector<JointOutcomeTable> &tables);

/// sin t cos t / (2 sqrt d).
double fourier_constant(double theta, int d);

/// rho(a,b) from a scan over K >= 4 uniformly spaced phases at fixed theta.
/// Throws NonUniformPhaseGrid or DegenerateStrength.
ComplexJointDistribution fourier_extract(const std::vector<JointOutcomeTable> &tables, const ObservablePair &pair);

/// Thrown by tomography() when the reconstructed matrix is not a valid state.
/// Carries the nearest valid state and its trace distance from the
/// (Hermitian, unit-trace) raw reconstruction.
class StateValidationError : public Error {
   public:
    StateValidationError(const std::string &message, DensityMatrix nearest, double projection_distance)
        : Error(ErrorCode::StateValidationFailed, message),
          nearest_(std::move(nearest)),
          projection_distance_(projection_distance) {
    }
    const DensityMatrix &nearest_state() const noexcept {
        return nearest_;
    }
    double projection_distance() const noexcept {
        return projection_distance_;
    }

   private:
    DensityMatrix nearest_;
    double projection_distance_;
};

/// rho = sum_{a,b} |a> (rho(a,b) / <b|a>) <b|, unsymmetrized.
/// Throws VanishingOverlap if some |<b|a>| <= 1e-9.
ComplexMatrix invert_complex_joint(const ComplexJointDistribution &dist);

/// Inverts the complex joint distribution, symmetrizes to (rho + rho^dagger)/2
/// and validates. Throws VanishingOverlap or StateValidationError.
DensityMatrix tomography(const ComplexJointDistribution &dist);

struct ProjectedState {
    DensityMatrix state;
    double projection_distance = 0.0;
};

/// Like tomography(), but returns the nearest valid state (eigenvalue
/// clipping, renormalization) for noisy input instead of throwing.
ProjectedState tomography_projected(const ComplexJointDistribution &dist);

enum class ReconstructionMethod { TwoPhase, FourierScan, Exact };

std::string_view method_name(ReconstructionMethod method);
std::optional<ReconstructionMethod> parse_method(std::string_view name);

struct ReconstructionReport {
    ComplexJointDistribution complex_joint;
    DensityMatrix reconstructed_state;
    /// |rho_rec(a,b) - complex_joint(a,b)| where rho_rec(a,b) is the complex
    /// joint distribution of the reconstructed state.
    RealMatrix residuals;
    double max_residual = 0.0;
    double rms_residual = 0.0;
    double projection_distance = 0.0;
    std::optional<double> trace_distance_to_truth;
    ReconstructionMethod method = ReconstructionMethod::Exact;
};

ReconstructionReport make_report(const ComplexJointDistribution &dist, ReconstructionMethod method,
                                 const std::optional<DensityMatrix> &truth = std::nullopt);

/// JSON object with "method", "d", "complex_joint" and "state" (each as
/// row-major "re"/"im" arrays, a-major), "residuals" (same layout, real) and
/// the scalars "max_residual", "rms_residual", "projection_distance" and,
/// when known, "trace_distance_to_truth".
std::string report_to_json(const ReconstructionReport &report);

/// Full two-phase pipeline on a pair of joint tables.
ComplexJointDistribution reconstruct_two_phase(const JointOutcomeTable &first, const JointOutcomeTable &second,
                                               const ObservablePair &pair);

struct SnrRequest {
    DensityMatrix state;
    ObservablePair pair;
    std::vector<double> thetas;
    /// Expected post-selected events per phase; each phase gets
    /// ceil(events / P(1)) shots. Absent means exact statistics.
    std::optional<int64_t> post_selected_events;
    int seeds = 10;
    uint64_t base_seed = 0;
    std::pair<double, double> phases{0.7853981633974483, -0.7853981633974483};
    int threads = 1;
};

struct SnrRow {
    double theta = 0.0;
    /// Seed average of the RMS error of Re rho(a,b) over all entries.
    double rms_error = 0.0;
    /// Standard error of that average across seeds.
    double standard_error = 0.0;
};

/// Rows sorted by theta. Throws InvalidArgument for fewer than two thetas or
/// fewer than ten seeds.
std::vector<SnrRow> snr_summary(const SnrRequest &request);

std::string snr_to_csv(const std::vector<SnrRow> &rows);

}  // namespace qcm
