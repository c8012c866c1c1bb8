// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mixforge::stats {

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

inline double beta_cdf(double x, double a, double b) { return incomplete_beta(a, b, x); }

/// Regularized upper incomplete gamma Q(s, x).
double upper_incomplete_gamma(double s, double x);

/// P(X > stat) for X ~ chi-square(dof).
double chi_square_sf(double stat, double dof);

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// KS statistic for samples supported on the grid {k / n}; compares the
/// empirical and nominal CDFs at every grid point.
double ks_statistic_grid(std::span<const double> samples, long long n, const std::function<double(double)>& cdf);

/// Asymptotic critical value of the KS statistic at significance level
/// `alpha`: sqrt(-ln(alpha / 2) / 2) / sqrt(n).
double ks_critical(std::size_t n, double alpha = 1e-3);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and (population) variance.
Moments moments(std::span<const double> samples);

/// `bins` equal-width counts over [0, 1]; 1.0 falls in the last bin.
std::vector<long long> unit_histogram(std::span<const double> samples, int bins);

struct ChiSquare {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Goodness of fit of `observed` counts against `expected_probs`.
/// Categories with zero expected probability are excluded from the
/// statistic; any count landing in one makes p = 0.
ChiSquare chi_square_test(std::span<const long long> observed, std::span<const double> expected_probs);

}  // namespace mixforge::stats
