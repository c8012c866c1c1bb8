// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mixforge/mixers.hpp"
#include "mixforge/rng.hpp"

namespace mixforge {

/// Malformed or inconsistent mixing recipe.
class RecipeError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Candidate mixers with their selection weights (one-to-one), the shared
/// mixer settings (alpha, decay, ...) and optional per-method overrides.
struct MixRecipe {
  std::vector<Method> candidates;
  std::vector<double> weights;
  MixerConfig mixer;
  std::map<Method, MixerConfig> overrides;

  /// [Mixup, CutMix, ResizeMix, Fmix], weights [1, 1, 1, 1], alpha 1.
  static MixRecipe standard();

  double alpha() const { return mixer.alpha; }
  const MixerConfig& config_for(Method m) const;
  void validate() const;
  bool operator==(const MixRecipe&) const = default;
};

enum class Selection { PerBatch, PerPair };
enum class LambdaGranularity { PerPair, PerBatch };

struct BatchOptions {
  Selection selection = Selection::PerBatch;
  LambdaGranularity lambda = LambdaGranularity::PerPair;
  /// Overrides every drawn target (still consumed from the stream).
  std::optional<double> forced_lambda;
  /// Worker count; never changes results.
  int threads = 1;
};

struct Pairing {
  std::vector<Index> permutation;
  /// (i, permutation[i]) for every i.
  std::vector<std::pair<Index, Index>> pairs;
};

struct MixedBatch {
  std::vector<MixResult> samples;
  std::vector<Index> pairing;
  /// The batch-level choice; with per-pair selection, the first pair's method.
  Method chosen_method = Method::Mixup;
  std::uint64_t seed = 0;
  Selection selection = Selection::PerBatch;
  LambdaGranularity lambda = LambdaGranularity::PerPair;
};

/// Pairs(X, RandPerm(X)). Self-pairs are kept.
Pairing pair_batch(std::span<const Sample> batch, Rng& rng);

Method select_mixer(const MixRecipe& recipe, Rng& rng);

/// Mix one batch from a fresh stream seeded with `seed`.
///
/// Draw order on the master stream: permutation, batch method (per-batch
/// selection), batch lambda (per-batch lambda), then for each pair its
/// method (per-pair selection), its lambda target and a forked substream for
/// mask placement. All draws precede the parallel fan-out. Self-pairs return
/// the sample unchanged.
MixedBatch mix_batch(std::span<const Sample> batch, const MixRecipe& recipe, std::uint64_t seed,
                     const BatchOptions& options = {});

/// Recipe mini-grammar:
///   candidates=<name,...>;weights=<r,...>;alpha=<r>[;fmix_decay=<r>]
///   [;interpolation=bilinear|nearest][;cutmix_lambda=uniform|beta]
MixRecipe parse_recipe(std::string_view text);
std::string format_recipe(const MixRecipe& recipe);

}  // namespace mixforge
