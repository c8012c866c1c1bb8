// SPDX-License-Identifier: Apache-2.0
#include "mixforge/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <thread>

namespace mixforge {

namespace {

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 256));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::function<double(double)> nominal_cdf(Method m, const MixerConfig& cfg) {
  if (m == Method::CutMix && cfg.cutmix_lambda == LambdaLaw::Uniform)
    return [](double x) { return std::clamp(x, 0.0, 1.0); };
  const double a = cfg.alpha;
  return [a](double x) { return stats::beta_cdf(x, a, a); };
}

void check_trials(std::size_t trials) {
  if (trials < 1000) throw InvalidArgument("reports need at least 1000 trials");
}

}  // namespace

bool LamDistributionReport::pass() const {
  return std::all_of(methods.begin(), methods.end(), [](const MethodLamReport& m) { return m.pass; });
}

std::vector<double> realized_lambdas(Method method, const MixerConfig& cfg, const SpatialShape& shape,
                                     std::size_t trials, const Rng& base, int threads) {
  cfg.validate();
  std::vector<double> lams(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng = base.substream(t);
    const double target = draw_lambda(method, rng, cfg);
    switch (method) {
      case Method::Mixup: lams[t] = target; break;
      case Method::CutMix: lams[t] = rect_mask(rng, shape, target, cfg.rect_placement).lam; break;
      case Method::ResizeMix: lams[t] = paste_region(rng, shape, target).lam; break;
      case Method::Fmix: lams[t] = fourier_mask(rng, shape, target, cfg.fmix_decay).lam; break;
    }
  });
  return lams;
}

LamDistributionReport lam_distribution_report(const MixRecipe& recipe, const SpatialShape& shape,
                                              std::size_t trials, std::uint64_t seed, int threads) {
  recipe.validate();
  check_trials(trials);
  LamDistributionReport report;
  report.shape = shape;
  report.trials = trials;
  report.seed = seed;
  const Rng root(seed);
  for (std::size_t c = 0; c < recipe.candidates.size(); ++c) {
    const Method m = recipe.candidates[c];
    const MixerConfig& cfg = recipe.config_for(m);
    const auto lams = realized_lambdas(m, cfg, shape, trials, root.substream(c), threads);
    const auto cdf = nominal_cdf(m, cfg);

    MethodLamReport r;
    r.method = m;
    r.histogram = stats::unit_histogram(lams, kLamHistogramBins);
    r.moments = stats::moments(lams);
    r.ks = stats::ks_statistic(lams, cdf);
    r.ks_threshold = stats::ks_critical(trials, kSignificance);
    switch (m) {
      case Method::Mixup:
        r.check = "ks < threshold";
        r.pass = r.ks < r.ks_threshold;
        break;
      case Method::Fmix:
        r.ks_quantized = stats::ks_statistic_grid(lams, shape.count(), cdf);
        r.check = "quantized ks < threshold";
        r.pass = r.ks_quantized < r.ks_threshold;
        break;
      default:
        r.check = "|mean - 0.5| <= 0.02";
        r.pass = std::abs(r.moments.mean - 0.5) <= kBoxLambdaBiasBound;
        break;
    }
    report.methods.push_back(std::move(r));
  }
  return report;
}

MethodFrequencyReport method_frequency_report(const MixRecipe& recipe, std::size_t trials, std::uint64_t seed) {
  recipe.validate();
  check_trials(trials);
  MethodFrequencyReport report;
  report.candidates = recipe.candidates;
  report.trials = trials;
  report.seed = seed;
  report.counts.assign(recipe.candidates.size(), 0);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const Method m = select_mixer(recipe, rng);
    const auto it = std::find(recipe.candidates.begin(), recipe.candidates.end(), m);
    ++report.counts[static_cast<std::size_t>(it - recipe.candidates.begin())];
  }
  const double total = std::accumulate(recipe.weights.begin(), recipe.weights.end(), 0.0);
  for (std::size_t i = 0; i < recipe.candidates.size(); ++i) {
    report.expected.push_back(recipe.weights[i] / total);
    report.observed.push_back(static_cast<double>(report.counts[i]) / static_cast<double>(trials));
  }
  report.chi_square = stats::chi_square_test(report.counts, report.expected);
  return report;
}

std::string lam_histogram_csv(const LamDistributionReport& report) {
  std::string out = "method,bin_lo,bin_hi,count\n";
  for (const auto& m : report.methods) {
    for (std::size_t b = 0; b < m.histogram.size(); ++b) {
      const double lo = static_cast<double>(b) / static_cast<double>(m.histogram.size());
      const double hi = static_cast<double>(b + 1) / static_cast<double>(m.histogram.size());
      char line[128];
      std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%lld\n", std::string(method_name(m.method)).c_str(), lo, hi,
                    m.histogram[b]);
      out += line;
    }
  }
  return out;
}

nlohmann::ordered_json validation_summary(const LamDistributionReport& lam, const MethodFrequencyReport& freq) {
  using json = nlohmann::ordered_json;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["rng"] = Rng::kAlgorithm;
  j["shape"] = lam.shape.dims();
  j["trials"] = lam.trials;
  j["seed"] = lam.seed;
  json methods = json::array();
  for (const auto& m : lam.methods) {
    json e;
    e["method"] = std::string(method_name(m.method));
    e["mean"] = m.moments.mean;
    e["variance"] = m.moments.variance;
    e["ks"] = m.ks;
    e["ks_quantized"] = m.ks_quantized;
    e["ks_threshold"] = m.ks_threshold;
    e["check"] = m.check;
    e["pass"] = m.pass;
    methods.push_back(std::move(e));
  }
  j["lambda"] = std::move(methods);
  json f;
  json cands = json::array();
  for (Method c : freq.candidates) cands.push_back(std::string(method_name(c)));
  f["candidates"] = std::move(cands);
  f["counts"] = freq.counts;
  f["expected"] = freq.expected;
  f["observed"] = freq.observed;
  f["chi_square"] = freq.chi_square.statistic;
  f["dof"] = freq.chi_square.dof;
  f["p_value"] = freq.chi_square.p_value;
  f["pass"] = freq.pass();
  j["selection"] = std::move(f);
  j["pass"] = lam.pass() && freq.pass();
  return j;
}

Tensor apply_occlusion(const Tensor& t, const MixMask& mask, float fill) {
  if (spatial_of(t.shape()) != mask.shape) throw InvalidArgument("occlusion mask does not match sample");
  Tensor out = t;
  const Index plane = mask.shape.count();
  const auto keep = mask.mask.data() > 0.5f;
  for (Index c = 0; c < t.channels(); ++c) {
    auto seg = out.data().segment(c * plane, plane);
    seg = keep.select(seg, fill);
  }
  return out;
}

std::size_t make_occluded_set(const DatasetManifest& manifest, const OcclusionOptions& options, const fs::path& out_dir) {
  if (!(options.fraction > 0.0 && options.fraction < 1.0))
    throw InvalidArgument("occluded fraction must lie in (0, 1)");
  if (options.blocks < 1) throw InvalidArgument("occlusion block count must be >= 1");
  std::size_t done = 0;
  using json = nlohmann::ordered_json;
  json files = json::array();
  const Rng root(options.seed);
  try {
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      const auto& entry = manifest.entries[i];
      const Tensor input = load_tensor(entry.path, manifest.kind);
      Rng rng = root.substream(i);
      const MixMask mask = occlusion_mask(rng, spatial_of(input.shape()), options.fraction, options.blocks);
      const float fill = manifest.kind == SampleKind::Audio ? 0.5f : 0.0f;
      const Tensor out = apply_occlusion(input, mask, fill);

      char prefix[32];
      std::snprintf(prefix, sizeof(prefix), "%05zu_", i);
      const fs::path name = std::string(prefix) + entry.path.filename().string();
      save_tensor(out, out_dir / name, manifest.kind);
      ++done;

      json e;
      e["index"] = i;
      e["input"] = entry.path.filename().string();
      e["output"] = name.string();
      e["class"] = entry.class_index;
      e["occluded"] = mask.shape.count() - mask.ones();
      e["lam"] = mask.lam;
      e["geometry"] = geometry_to_json(mask.geometry);
      files.push_back(std::move(e));
    }
    json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["rng"] = Rng::kAlgorithm;
    meta["seed"] = options.seed;
    meta["fraction"] = options.fraction;
    meta["blocks"] = options.blocks;
    meta["files"] = std::move(files);
    write_text(out_dir / "occlusion.json", meta.dump(2) + "\n");
  } catch (const IoError& e) {
    throw PartialWriteError(e.what(), done);
  } catch (const fs::filesystem_error& e) {
    throw PartialWriteError(e.what(), done);
  }
  return done;
}

}  // namespace mixforge
