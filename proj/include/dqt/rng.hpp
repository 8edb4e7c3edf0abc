// Copyright 2026 The dqtraj Authors
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

#ifndef DQT_RNG_HPP
#define DQT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace dqt {

/// SplitMix64 finalizer. All randomness in the library is derived from this
/// mixer, so runs are bit-reproducible across platforms and thread counts.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Injective-by-construction derivation of a child seed from a master seed,
/// a stream index, and a purpose tag. Distinct (master, index, tag) triples
/// land in distinct mixer orbits.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t tag = 0) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (index * 0xD6E8FEB86659FD93ULL + 1));
  h = mix64(h ^ (tag * 0xA5A5A5A5A5A5A5A5ULL + 2));
  return h;
}

/// Counter-free splittable stream: a SplitMix64 sequence seeded by
/// derive_seed. Good enough statistically for Monte Carlo at desk scale and
/// trivially portable.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (deterministic, two uniforms per pair).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Stateless uniform in [0,1) attached to (seed, signed index). Used by the
/// two-sided sequence environments, where the symbol stream must be a pure
/// function of the point's identity.
inline double indexed_uniform(std::uint64_t seed, long long index) {
  // Zig-zag encode so negative indices get their own counters.
  const std::uint64_t u =
      index >= 0 ? 2ULL * static_cast<std::uint64_t>(index)
                 : 2ULL * static_cast<std::uint64_t>(-(index + 1)) + 1ULL;
  return static_cast<double>(mix64(seed ^ mix64(u)) >> 11) * 0x1.0p-53;
}

}  // namespace dqt

#endif  // DQT_RNG_HPP
