// SPDX-License-Identifier: Apache-2.0
#include "mixforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mixforge::stats {

namespace {

constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_fraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double upper_incomplete_gamma(double s, double x) {
  if (!(s > 0.0)) throw std::invalid_argument("upper_incomplete_gamma needs s > 0");
  if (x <= 0.0) return 1.0;
  const double log_front = -x + s * std::log(x) - std::lgamma(s);
  if (x < s + 1.0) {
    // Series for the lower function P.
    double sum = 1.0 / s, term = sum, ap = s;
    for (int n = 0; n < 100000; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::max(0.0, 1.0 - sum * std::exp(log_front));
  }
  // Continued fraction for Q (Lentz).
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(log_front) * h;
}

double chi_square_sf(double stat, double dof) {
  if (dof <= 0.0) return 1.0;
  return upper_incomplete_gamma(dof / 2.0, stat / 2.0);
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic of no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_statistic_grid(std::span<const double> samples, long long n, const std::function<double(double)>& cdf) {
  if (samples.empty() || n < 1) throw std::invalid_argument("ks_statistic_grid needs samples and n >= 1");
  std::vector<long long> counts(static_cast<std::size_t>(n + 1), 0);
  for (double s : samples) {
    const long long k = std::clamp(std::llround(s * static_cast<double>(n)), 0LL, n);
    ++counts[static_cast<std::size_t>(k)];
  }
  const auto total = static_cast<double>(samples.size());
  double cumulative = 0.0, d = 0.0;
  for (long long k = 0; k <= n; ++k) {
    cumulative += static_cast<double>(counts[static_cast<std::size_t>(k)]);
    const double nominal = cdf(static_cast<double>(k) / static_cast<double>(n));
    d = std::max(d, std::abs(cumulative / total - nominal));
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

Moments moments(std::span<const double> samples) {
  Moments m;
  if (samples.empty()) return m;
  const auto n = static_cast<double>(samples.size());
  m.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - m.mean) * (s - m.mean);
  m.variance = ss / n;
  return m;
}

std::vector<long long> unit_histogram(std::span<const double> samples, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  std::vector<long long> counts(static_cast<std::size_t>(bins), 0);
  for (double s : samples) {
    const int b = std::clamp(static_cast<int>(std::floor(s * bins)), 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

ChiSquare chi_square_test(std::span<const long long> observed, std::span<const double> expected_probs) {
  if (observed.size() != expected_probs.size()) throw std::invalid_argument("chi-square category mismatch");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), 0LL));
  ChiSquare out;
  int categories = 0;
  bool impossible = false;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected_probs[i] <= 0.0) {
      impossible = impossible || observed[i] > 0;
      continue;
    }
    const double e = expected_probs[i] * total;
    const double diff = static_cast<double>(observed[i]) - e;
    out.statistic += diff * diff / e;
    ++categories;
  }
  out.dof = std::max(0, categories - 1);
  out.p_value = impossible ? 0.0 : chi_square_sf(out.statistic, out.dof);
  return out;
}

}  // namespace mixforge::stats
