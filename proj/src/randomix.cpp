// SPDX-License-Identifier: Apache-2.0
#include "mixforge/randomix.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <thread>

namespace mixforge {

MixRecipe MixRecipe::standard() {
  MixRecipe r;
  r.candidates = {Method::Mixup, Method::CutMix, Method::ResizeMix, Method::Fmix};
  r.weights = {1.0, 1.0, 1.0, 1.0};
  return r;
}

const MixerConfig& MixRecipe::config_for(Method m) const {
  const auto it = overrides.find(m);
  return it == overrides.end() ? mixer : it->second;
}

void MixRecipe::validate() const {
  if (candidates.empty()) throw RecipeError("recipe needs at least one candidate");
  if (std::set<Method>(candidates.begin(), candidates.end()).size() != candidates.size())
    throw RecipeError("recipe candidates must be unique");
  if (weights.size() != candidates.size())
    throw RecipeError("recipe needs exactly one weight per candidate");
  try {
    check_weights(weights);
    mixer.validate();
    for (const auto& [m, cfg] : overrides) cfg.validate();
  } catch (const InvalidArgument& e) {
    throw RecipeError(e.what());
  }
}

Pairing pair_batch(std::span<const Sample> batch, Rng& rng) {
  if (batch.empty()) throw InvalidArgument("cannot pair an empty batch");
  Pairing p;
  p.permutation = rand_perm(rng, static_cast<Index>(batch.size()));
  p.pairs.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) p.pairs.emplace_back(static_cast<Index>(i), p.permutation[i]);
  return p;
}

Method select_mixer(const MixRecipe& recipe, Rng& rng) {
  recipe.validate();
  return recipe.candidates[static_cast<std::size_t>(rand_choice_weighted(rng, recipe.weights))];
}

namespace {

struct PairPlan {
  Index a = 0, b = 0;
  Method method = Method::Mixup;
  double lam_target = 1.0;
  Rng rng;
};

MixResult run_pair(std::span<const Sample> batch, const PairPlan& plan, const MixRecipe& recipe) {
  const Sample& a = batch[static_cast<std::size_t>(plan.a)];
  if (plan.a == plan.b) {
    MixResult r;
    r.x = a.x;
    r.y = a.y;
    r.lam = 1.0;
    r.lam_target = plan.lam_target;
    r.method = plan.method;
    return r;
  }
  Rng rng = plan.rng;
  return apply_mixer(plan.method, a, batch[static_cast<std::size_t>(plan.b)], plan.lam_target, rng,
                     recipe.config_for(plan.method));
}

}  // namespace

MixedBatch mix_batch(std::span<const Sample> batch, const MixRecipe& recipe, std::uint64_t seed,
                     const BatchOptions& options) {
  recipe.validate();
  if (batch.empty()) throw InvalidArgument("cannot mix an empty batch");
  if (options.selection == Selection::PerPair && options.lambda == LambdaGranularity::PerBatch)
    throw RecipeError("per-batch lambda requires per-batch method selection");
  for (const Sample& s : batch) check_compatible(batch.front(), s);

  Rng master(seed);
  MixedBatch out;
  out.seed = seed;
  out.selection = options.selection;
  out.lambda = options.lambda;

  const Pairing pairing = pair_batch(batch, master);
  out.pairing = pairing.permutation;

  if (options.selection == Selection::PerBatch) out.chosen_method = select_mixer(recipe, master);
  double batch_lam = 0.0;
  if (options.lambda == LambdaGranularity::PerBatch) {
    batch_lam = draw_lambda(out.chosen_method, master, recipe.config_for(out.chosen_method));
  }

  std::vector<PairPlan> plans(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    PairPlan& p = plans[i];
    p.a = pairing.pairs[i].first;
    p.b = pairing.pairs[i].second;
    p.method = options.selection == Selection::PerPair ? select_mixer(recipe, master) : out.chosen_method;
    p.lam_target = options.lambda == LambdaGranularity::PerBatch
                       ? batch_lam
                       : draw_lambda(p.method, master, recipe.config_for(p.method));
    if (options.forced_lambda) p.lam_target = *options.forced_lambda;
    p.rng = master.fork();
  }
  if (options.selection == Selection::PerPair) out.chosen_method = plans.front().method;

  out.samples.resize(batch.size());
  const auto workers = static_cast<std::size_t>(std::clamp(options.threads, 1, 256));
  if (workers == 1 || batch.size() == 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) out.samples[i] = run_pair(batch, plans[i], recipe);
    return out;
  }

  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < batch.size(); i += workers)
            out.samples[i] = run_pair(batch, plans[i], recipe);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace mixforge
