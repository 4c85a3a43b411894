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

#include <array>
#include <complex>
#include <cstdint>

namespace qcm {

/// SplitMix64 finalizer. Used for seeding and for deriving sub-stream seeds.
///
///   z ^= z >> 30; z *= 0xbf58476d1ce4e5b9;
///   z ^= z >> 27; z *= 0x94d049bb133111eb;
///   z ^= z >> 31;
constexpr uint64_t mix64(uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of sub-stream `index` of a stream seeded with `seed`:
/// mix64(seed + 0x9e3779b97f4a7c15 * (index + 1)).
constexpr uint64_t sub_seed(uint64_t seed, uint64_t index) noexcept {
    return mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// xoshiro256** with state filled from a SplitMix64 sequence started at
/// `seed`. Output is bit-identical across platforms and compilers, which
/// std::mt19937_64 plus std:: distributions are not.
class Rng {
   public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed) noexcept;

    uint64_t next() noexcept;
    uint64_t operator()() noexcept {
        return next();
    }
    static constexpr uint64_t min() noexcept {
        return 0;
    }
    static constexpr uint64_t max() noexcept {
        return ~uint64_t{0};
    }

    /// Uniform in [0, 1) with 53 random bits: (next() >> 11) * 2^-53.
    double uniform() noexcept;

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept;

    /// Complex Gaussian with independent standard normal real and imaginary parts.
    std::complex<double> complex_normal() noexcept;

   private:
    std::array<uint64_t, 4> s_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace qcm
