// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixforge/io.hpp"
#include "mixforge/randomix.hpp"
#include "mixforge/stats.hpp"

namespace mixforge {

inline constexpr int kLamHistogramBins = 64;
/// Allowed |mean - 0.5| of the realized lambda for box-shaped mask mixers.
inline constexpr double kBoxLambdaBiasBound = 0.02;
inline constexpr double kSignificance = 1e-3;

struct MethodLamReport {
  Method method = Method::Mixup;
  std::vector<long long> histogram;
  stats::Moments moments;
  /// KS against the continuous nominal law of the drawn target.
  double ks = 0.0;
  /// KS of the realized values against the nominal law pushed through
  /// ceil(lam * N) / N; only meaningful for Fmix.
  double ks_quantized = 0.0;
  double ks_threshold = 0.0;
  std::string check;
  bool pass = false;
};

struct LamDistributionReport {
  SpatialShape shape;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<MethodLamReport> methods;
  bool pass() const;
};

/// Realized lambda of `trials` draws per candidate on masks of `shape`.
/// Trial t of candidate c uses stream Rng(seed).substream(c).substream(t),
/// so the thread count never changes results.
LamDistributionReport lam_distribution_report(const MixRecipe& recipe, const SpatialShape& shape,
                                              std::size_t trials, std::uint64_t seed, int threads = 1);

/// Realized lambda samples for one method; the raw data behind the report.
std::vector<double> realized_lambdas(Method method, const MixerConfig& cfg, const SpatialShape& shape,
                                     std::size_t trials, const Rng& base, int threads = 1);

struct MethodFrequencyReport {
  std::vector<Method> candidates;
  std::vector<long long> counts;
  std::vector<double> expected;
  std::vector<double> observed;
  stats::ChiSquare chi_square;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool pass() const { return chi_square.p_value > kSignificance; }
};

MethodFrequencyReport method_frequency_report(const MixRecipe& recipe, std::size_t trials, std::uint64_t seed);

/// CSV rows "method,bin_lo,bin_hi,count".
std::string lam_histogram_csv(const LamDistributionReport& report);
nlohmann::ordered_json validation_summary(const LamDistributionReport& lam, const MethodFrequencyReport& freq);

/// Thrown when writing an occluded set fails part-way.
class PartialWriteError : public IoError {
 public:
  PartialWriteError(const std::string& what, std::size_t completed) : IoError(what), completed_(completed) {}
  std::size_t completed() const { return completed_; }

 private:
  std::size_t completed_;
};

struct OcclusionOptions {
  double fraction = 0.0;
  int blocks = 1;
  std::uint64_t seed = 0;
};

/// Sets every masked-off element of every channel to `fill`.
Tensor apply_occlusion(const Tensor& t, const MixMask& mask, float fill = 0.0f);

/// Writes one occluded file per manifest entry plus occlusion.json into
/// `out_dir`. Entry i uses Rng(seed).substream(i). Images are filled with 0,
/// audio with raw silence (0.5 after rescaling). Returns the file count.
std::size_t make_occluded_set(const DatasetManifest& manifest, const OcclusionOptions& options, const fs::path& out_dir);

}  // namespace mixforge
