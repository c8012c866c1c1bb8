// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "mixforge/randomix.hpp"
#include "mixforge/stats.hpp"
#include "oracles.hpp"

using namespace mixforge;

namespace {

std::vector<Sample> make_batch(std::size_t n, std::vector<Index> shape, std::uint64_t seed, Index classes = 10) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(Sample{oracle::random_tensor(shape, seed + i), SoftLabel::one_hot(static_cast<Index>(i) % classes, classes)});
  return out;
}

bool same_results(const MixedBatch& a, const MixedBatch& b) {
  if (a.samples.size() != b.samples.size() || a.pairing != b.pairing || a.chosen_method != b.chosen_method) return false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& x = a.samples[i];
    const auto& y = b.samples[i];
    if (!(x.x == y.x) || x.lam != y.lam || x.lam_target != y.lam_target || x.method != y.method ||
        x.geometry != y.geometry || x.y.probs() != y.y.probs())
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("standard recipe") {
  const auto r = MixRecipe::standard();
  CHECK(r.candidates.size() == 4);
  CHECK(r.weights == std::vector<double>{1, 1, 1, 1});
  CHECK(r.alpha() == 1.0);
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("recipe validation") {
  auto r = MixRecipe::standard();
  r.weights = {1, 1, 1};
  CHECK_THROWS_AS(r.validate(), RecipeError);
  r.weights = {0, 0, 0, 0};
  CHECK_THROWS_AS(r.validate(), RecipeError);
  r = MixRecipe::standard();
  r.candidates[1] = Method::Mixup;
  CHECK_THROWS_AS(r.validate(), RecipeError);
  r = MixRecipe::standard();
  r.mixer.alpha = -1;
  CHECK_THROWS_AS(r.validate(), RecipeError);
  r = MixRecipe::standard();
  r.candidates.clear();
  r.weights.clear();
  CHECK_THROWS_AS(r.validate(), RecipeError);
}

TEST_CASE("recipe grammar") {
  SUBCASE("parse") {
    const auto r = parse_recipe("candidates=mixup,fmix;weights=3,1;alpha=0.2;fmix_decay=2.5;interpolation=nearest");
    CHECK(r.candidates == std::vector<Method>{Method::Mixup, Method::Fmix});
    CHECK(r.weights == std::vector<double>{3, 1});
    CHECK(r.alpha() == 0.2);
    CHECK(r.mixer.fmix_decay == 2.5);
    CHECK(r.mixer.interpolation == Interpolation::Nearest);
  }
  SUBCASE("weights default to equal") {
    CHECK(parse_recipe("candidates=cutmix,resizemix").weights == std::vector<double>{1, 1});
  }
  SUBCASE("format round trips") {
    auto r = MixRecipe::standard();
    r.weights = {0.1, 2, 3.25, 0};
    r.mixer.alpha = 0.3;
    r.mixer.cutmix_lambda = LambdaLaw::Beta;
    CHECK(parse_recipe(format_recipe(r)) == r);
    CHECK(parse_recipe(format_recipe(MixRecipe::standard())) == MixRecipe::standard());
  }
  SUBCASE("errors") {
    for (const char* bad : {"", "weights=1", "candidates=mosaic", "candidates=mixup;weights=1,2",
                            "candidates=mixup;alpha=abc", "candidates=mixup;alpha=0", "candidates=mixup;bogus=1",
                            "candidates=mixup;candidates=fmix", "candidates=mixup;weights=-1",
                            "candidates=mixup;interpolation=cubic", "candidates=mixup,mixup"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_recipe(bad), RecipeError);
    }
  }
}

TEST_CASE("method selection frequencies follow the weights") {
  for (const auto& w : {std::vector<double>{1, 1, 1, 1}, std::vector<double>{2, 1, 1, 1}, std::vector<double>{3, 1, 1, 1},
                        std::vector<double>{4, 1, 1, 1}}) {
    auto recipe = MixRecipe::standard();
    recipe.weights = w;
    Rng rng(static_cast<std::uint64_t>(w[0]));
    std::vector<long long> counts(4, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const Method m = select_mixer(recipe, rng);
      ++counts[static_cast<std::size_t>(std::find(recipe.candidates.begin(), recipe.candidates.end(), m) -
                                        recipe.candidates.begin())];
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> p;
    for (std::size_t i = 0; i < 4; ++i) {
      p.push_back(w[i] / total);
      CHECK(std::abs(static_cast<double>(counts[i]) / n - p.back()) < 0.01);
    }
    CHECK(stats::chi_square_test(counts, p).p_value > 1e-3);
  }
}

TEST_CASE("pairing is a uniform permutation") {
  const auto batch = make_batch(4, {1, 2, 2}, 0);
  Rng rng(9);
  std::map<std::vector<Index>, long long> counts;
  const int n = 240000;
  for (int i = 0; i < n; ++i) ++counts[pair_batch(batch, rng).permutation];
  CHECK(counts.size() == 24);
  for (const auto& [perm, c] : counts) CHECK(std::abs(static_cast<double>(c) / n - 1.0 / 24.0) < 0.005);

  const auto big = make_batch(256, {1, 2, 2}, 0);
  for (int i = 0; i < 200; ++i) {
    const auto p = pair_batch(big, rng);
    CHECK(std::set<Index>(p.permutation.begin(), p.permutation.end()).size() == 256);
    for (std::size_t j = 0; j < 256; ++j) CHECK(p.pairs[j] == std::pair<Index, Index>(static_cast<Index>(j), p.permutation[j]));
  }
}

TEST_CASE("mix_batch") {
  const auto recipe = MixRecipe::standard();
  const auto batch = make_batch(16, {3, 12, 12}, 100);

  SUBCASE("same seed, same result; thread count never matters") {
    const auto ref = mix_batch(batch, recipe, 42);
    for (int threads : {1, 2, 3, 8}) {
      BatchOptions o;
      o.threads = threads;
      CHECK(same_results(ref, mix_batch(batch, recipe, 42, o)));
    }
    CHECK_FALSE(same_results(ref, mix_batch(batch, recipe, 43)));
  }
  SUBCASE("per-batch selection uses one method") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto out = mix_batch(batch, recipe, seed);
      for (const auto& s : out.samples) CHECK(s.method == out.chosen_method);
    }
  }
  SUBCASE("per-pair selection varies the method") {
    BatchOptions o;
    o.selection = Selection::PerPair;
    const auto out = mix_batch(make_batch(64, {1, 8, 8}, 0), recipe, 5, o);
    std::set<Method> seen;
    for (const auto& s : out.samples) seen.insert(s.method);
    CHECK(seen.size() > 1);
    CHECK(out.chosen_method == out.samples.front().method);
    o.lambda = LambdaGranularity::PerBatch;
    CHECK_THROWS_AS(mix_batch(batch, recipe, 5, o), RecipeError);
  }
  SUBCASE("per-batch lambda shares one target") {
    BatchOptions o;
    o.lambda = LambdaGranularity::PerBatch;
    const auto out = mix_batch(batch, recipe, 6, o);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
      if (out.pairing[i] != static_cast<Index>(i)) CHECK(out.samples[i].lam_target == out.samples[0].lam_target);
  }
  SUBCASE("labels use the realized lambda of each pair") {
    const auto out = mix_batch(batch, recipe, 7);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto j = static_cast<std::size_t>(out.pairing[i]);
      const auto& s = out.samples[i];
      const auto expect = SoftLabel::mix(batch[i].y, batch[j].y, s.lam);
      CHECK((s.y.probs() - expect.probs()).cwiseAbs().maxCoeff() < 1e-6f);
    }
  }
  SUBCASE("batch of one returns the sample unchanged") {
    const std::vector<Sample> one(batch.begin(), batch.begin() + 1);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto out = mix_batch(one, recipe, seed);
      CHECK(out.samples[0].x == one[0].x);
      CHECK(out.samples[0].y.probs() == one[0].y.probs());
      CHECK(out.samples[0].lam == 1.0);
    }
  }
  SUBCASE("forced lambda") {
    auto mixup_only = parse_recipe("candidates=mixup");
    BatchOptions o;
    o.forced_lambda = 0.25;
    const auto out = mix_batch(batch, mixup_only, 8, o);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto j = static_cast<std::size_t>(out.pairing[i]);
      if (j == i) continue;
      for (Index k = 0; k < batch[i].x.size(); ++k)
        CHECK(std::abs(out.samples[i].x[k] - (0.25 * batch[i].x[k] + 0.75 * batch[j].x[k])) <= 1e-6);
    }
  }
  SUBCASE("rejects bad batches") {
    CHECK_THROWS_AS(mix_batch(std::span<const Sample>{}, recipe, 0), InvalidArgument);
    auto mixed = batch;
    mixed.push_back(Sample{oracle::random_tensor({3, 12, 13}, 1), SoftLabel::one_hot(0, 10)});
    CHECK_THROWS_AS(mix_batch(mixed, recipe, 0), InvalidArgument);
  }
  SUBCASE("signals") {
    const auto sig = make_batch(8, {2, 1000}, 3);
    const auto out = mix_batch(sig, recipe, 9);
    for (const auto& s : out.samples) CHECK(s.x.shape() == std::vector<Index>{2, 1000});
  }
}
