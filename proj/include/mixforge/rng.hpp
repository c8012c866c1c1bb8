// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mixforge/tensor.hpp"

namespace mixforge {

/// xoshiro256** generator seeded through splitmix64.
///
/// The output sequence is a pure function of the 64-bit seed. Independent
/// substreams are derived either by key (`substream`) without touching this
/// stream, or sequentially (`fork`) by consuming one draw from it. Instances
/// are single-owner; parallel work gets its own pre-split stream.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "xoshiro256**/splitmix64";

  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// 53-bit uniform draw in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Stream keyed by (seed, key); does not advance this stream.
  Rng substream(std::uint64_t key) const;

  /// Child stream seeded from the next draw of this stream.
  Rng fork() { return Rng(next_u64()); }

  bool operator==(const Rng&) const = default;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Draw in [lo, hi).
double sample_uniform(Rng& rng, double lo, double hi);

/// Uniform integer in [0, n), unbiased (rejection on the 64-bit range).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Standard normal (Marsaglia polar method).
double sample_normal(Rng& rng);

/// log of a Gamma(shape, 1) draw. Working in log space keeps shape << 1
/// away from underflow.
double sample_log_gamma(Rng& rng, double shape);

double sample_gamma(Rng& rng, double shape);

/// Beta(alpha, alpha) as G1 / (G1 + G2); always strictly inside (0, 1).
double sample_beta(Rng& rng, double alpha);

/// Uniform permutation of 0..n-1 (Fisher-Yates).
std::vector<Index> rand_perm(Rng& rng, Index n);

/// Index i drawn with probability weights[i] / sum(weights).
Index rand_choice_weighted(Rng& rng, std::span<const double> weights);

/// Throws unless weights are finite, non-negative and not all zero.
void check_weights(std::span<const double> weights);

}  // namespace mixforge
