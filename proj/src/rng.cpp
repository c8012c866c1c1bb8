// SPDX-License-Identifier: Apache-2.0
#include "mixforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mixforge {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

Rng Rng::substream(std::uint64_t key) const {
  std::uint64_t k = key;
  std::uint64_t mixed = seed_ ^ splitmix64(k);
  return Rng(splitmix64(mixed));
}

double sample_uniform(Rng& rng, double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgument("sample_uniform requires finite lo < hi");
  const double v = lo + (hi - lo) * rng.next_double();
  // lo + (hi-lo)*u can round up to hi for u close to 1.
  return v < hi ? v : std::nextafter(hi, lo);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index requires n > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng.next_u64();
  } while (x >= limit);
  return x % n;
}

double sample_normal(Rng& rng) {
  double u, v, s;
  do {
    u = 2.0 * rng.next_double() - 1.0;
    v = 2.0 * rng.next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double sample_log_gamma(Rng& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw InvalidArgument("gamma shape must be finite and positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a + 1) * U^(1/a).
    double u;
    do {
      u = rng.next_double();
    } while (u == 0.0);
    return sample_log_gamma(rng, shape + 1.0) + std::log(u) / shape;
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

double sample_gamma(Rng& rng, double shape) { return std::exp(sample_log_gamma(rng, shape)); }

double sample_beta(Rng& rng, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidArgument("beta alpha must be finite and positive");
  const double lg1 = sample_log_gamma(rng, alpha);
  const double lg2 = sample_log_gamma(rng, alpha);
  // G1 / (G1 + G2) = 1 / (1 + exp(lg2 - lg1))
  double b = 1.0 / (1.0 + std::exp(lg2 - lg1));
  if (b <= 0.0) b = std::numeric_limits<double>::denorm_min();
  if (b >= 1.0) b = std::nextafter(1.0, 0.0);
  return b;
}

std::vector<Index> rand_perm(Rng& rng, Index n) {
  if (n < 1) throw InvalidArgument("rand_perm requires n >= 1");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

void check_weights(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("weights must be non-empty");
  bool any_positive = false;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw InvalidArgument("weights must be finite and non-negative");
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw InvalidArgument("at least one weight must be positive");
}

Index rand_choice_weighted(Rng& rng, std::span<const double> weights) {
  check_weights(weights);
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double target = rng.next_double() * cumulative.back();
  // First index whose cumulative weight exceeds the target; zero-weight
  // entries share their predecessor's cumulative value and are never hit.
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) {
    for (std::size_t i = weights.size(); i-- > 0;)
      if (weights[i] > 0.0) return static_cast<Index>(i);
  }
  return static_cast<Index>(it - cumulative.begin());
}

}  // namespace mixforge
