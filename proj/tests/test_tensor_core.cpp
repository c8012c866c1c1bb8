// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "mixforge/rng.hpp"
#include "mixforge/stats.hpp"
#include "mixforge/tensor.hpp"
#include "oracles.hpp"

using namespace mixforge;

TEST_CASE("xoshiro256** matches an independent reference sequence") {
  // Reference values from a separate big-integer implementation of
  // splitmix64 seeding + xoshiro256**.
  Rng a(42);
  CHECK(a.next_u64() == 0x15780b2e0c2ec716ULL);
  CHECK(a.next_u64() == 0x6104d9866d113a7eULL);
  CHECK(a.next_u64() == 0xae17533239e499a1ULL);
  CHECK(a.next_u64() == 0xecb8ad4703b360a1ULL);
  Rng z(0);
  CHECK(z.next_u64() == 0x99ec5f36cb75f2b4ULL);
  CHECK(z.next_u64() == 0xbf6e1f784956452aULL);
}

TEST_CASE("substreams are keyed and independent of the parent position") {
  Rng a(7), b(7);
  b.next_u64();
  CHECK(a.substream(3) == b.substream(3));
  CHECK_FALSE(a.substream(3) == a.substream(4));
  Rng fa = a.fork(), fb = Rng(7).fork();
  CHECK(fa == fb);
}

TEST_CASE("sample_uniform") {
  SUBCASE("mean over 1e5 draws") {
    Rng rng(1);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) sum += sample_uniform(rng, 0.0, 1.0);
    CHECK(std::abs(sum / 100000 - 0.5) < 0.005);
  }
  SUBCASE("seed 42 twice gives byte-identical sequences") {
    Rng r1(42), r2(42);
    for (int i = 0; i < 1000; ++i) {
      const double x = sample_uniform(r1, 0.0, 1.0), y = sample_uniform(r2, 0.0, 1.0);
      CHECK(std::memcmp(&x, &y, sizeof x) == 0);
    }
  }
  SUBCASE("range contract") {
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
      const double v = sample_uniform(rng, 0.1, 0.8);
      CHECK(v >= 0.1);
      CHECK(v < 0.8);
    }
  }
  SUBCASE("rejects lo >= hi") {
    Rng rng(0);
    CHECK_THROWS_AS(sample_uniform(rng, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(sample_uniform(rng, 2.0, 1.0), InvalidArgument);
  }
}

TEST_CASE("sample_beta") {
  SUBCASE("alpha = 1 is uniform") {
    Rng rng(11);
    std::vector<double> draws(100000);
    for (auto& d : draws) d = sample_beta(rng, 1.0);
    CHECK(stats::ks_statistic(draws, [](double x) { return x; }) < 0.01);
  }
  SUBCASE("alpha = 0.2 moments match quadrature of the density") {
    const auto ref = oracle::beta_moments_by_quadrature(0.2);
    CHECK(ref.mean == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(ref.variance == doctest::Approx(1.0 / (4.0 * 1.4)).epsilon(1e-4));  // 0.178571...
    Rng rng(12);
    std::vector<double> draws(100000);
    for (auto& d : draws) d = sample_beta(rng, 0.2);
    const auto m = stats::moments(draws);
    CHECK(std::abs(m.mean - 0.5) < 0.01);
    CHECK(std::abs(m.variance - ref.variance) < 0.01);
  }
  SUBCASE("huge alpha concentrates at 1/2") {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) CHECK(std::abs(sample_beta(rng, 1e9) - 0.5) < 1e-3);
  }
  SUBCASE("always strictly inside (0, 1)") {
    Rng rng(14);
    for (double alpha : {0.01, 0.05, 0.2, 1.0, 5.0}) {
      for (int i = 0; i < 20000; ++i) {
        const double b = sample_beta(rng, alpha);
        REQUIRE(b > 0.0);
        REQUIRE(b < 1.0);
      }
    }
  }
  SUBCASE("rejects bad alpha") {
    Rng rng(0);
    CHECK_THROWS_AS(sample_beta(rng, 0.0), InvalidArgument);
    CHECK_THROWS_AS(sample_beta(rng, -1.0), InvalidArgument);
    CHECK_THROWS_AS(sample_beta(rng, std::nan("")), InvalidArgument);
    CHECK_THROWS_AS(sample_beta(rng, INFINITY), InvalidArgument);
  }
}

TEST_CASE("gamma draws have the right mean") {
  Rng rng(21);
  for (double shape : {0.3, 1.0, 4.5}) {
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample_gamma(rng, shape);
    // Var = shape, so 5 sigma = 5 sqrt(shape / n)
    CHECK(std::abs(sum / n - shape) < 5.0 * std::sqrt(shape / n));
  }
}

TEST_CASE("rand_perm") {
  Rng rng(3);
  CHECK(rand_perm(rng, 1) == std::vector<Index>{0});
  CHECK_THROWS_AS(rand_perm(rng, 0), InvalidArgument);

  SUBCASE("n = 3 frequencies against enumeration of S3") {
    std::vector<Index> base{0, 1, 2};
    std::map<std::vector<Index>, int> counts;
    do counts[base] = 0;
    while (std::next_permutation(base.begin(), base.end()));
    REQUIRE(counts.size() == 6);
    for (int i = 0; i < 60000; ++i) ++counts.at(rand_perm(rng, 3));
    for (const auto& [perm, c] : counts) CHECK(std::abs(c / 60000.0 - 1.0 / 6.0) < 0.01);
  }
  SUBCASE("n = 256 is a bijection") {
    for (int rep = 0; rep < 50; ++rep) {
      auto p = rand_perm(rng, 256);
      std::sort(p.begin(), p.end());
      std::vector<Index> expect(256);
      std::iota(expect.begin(), expect.end(), Index{0});
      CHECK(p == expect);
    }
  }
}

TEST_CASE("rand_choice_weighted") {
  const auto freq = [](std::vector<double> w, std::uint64_t seed, int n) {
    Rng rng(seed);
    std::vector<double> f(w.size(), 0.0);
    for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(rand_choice_weighted(rng, w))] += 1.0 / n;
    return f;
  };
  SUBCASE("[1,1,1,1]") {
    for (double f : freq({1, 1, 1, 1}, 1, 100000)) CHECK(std::abs(f - 0.25) < 0.01);
  }
  SUBCASE("[3,1,1,1]") {
    const auto f = freq({3, 1, 1, 1}, 2, 100000);
    CHECK(std::abs(f[0] - 0.5) < 0.01);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(f[i] - 1.0 / 6.0) < 0.01);
  }
  SUBCASE("single non-zero weight") {
    Rng rng(3);
    const std::vector<double> w{0, 0, 5, 0};
    for (int i = 0; i < 1000; ++i) CHECK(rand_choice_weighted(rng, w) == 2);
  }
  SUBCASE("invalid weights") {
    Rng rng(0);
    CHECK_THROWS_AS(rand_choice_weighted(rng, std::vector<double>{0, 0}), InvalidArgument);
    CHECK_THROWS_AS(rand_choice_weighted(rng, std::vector<double>{1, -1}), InvalidArgument);
    CHECK_THROWS_AS(rand_choice_weighted(rng, std::vector<double>{1, NAN}), InvalidArgument);
    CHECK_THROWS_AS(rand_choice_weighted(rng, std::vector<double>{}), InvalidArgument);
  }
  SUBCASE("chi-square passes for random weight vectors of up to 8 entries") {
    Rng gen(99);
    for (int trial = 0; trial < 25; ++trial) {
      const auto k = static_cast<std::size_t>(1 + uniform_index(gen, 8));
      std::vector<double> w(k);
      for (auto& x : w) x = uniform_index(gen, 4) == 0 ? 0.0 : sample_uniform(gen, 0.01, 10.0);
      if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) w[0] = 1.0;
      Rng rng = gen.fork();
      std::vector<long long> counts(k, 0);
      for (int i = 0; i < 100000; ++i) ++counts[static_cast<std::size_t>(rand_choice_weighted(rng, w))];
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      std::vector<double> p(k);
      for (std::size_t i = 0; i < k; ++i) p[i] = w[i] / total;
      const auto chi = stats::chi_square_test(counts, p);
      CAPTURE(trial);
      CHECK(chi.p_value > 0.001);
    }
  }
}

TEST_CASE("statistics helpers against reference values") {
  // scipy.stats reference values.
  CHECK(stats::beta_cdf(0.3, 0.2, 0.2) == doctest::Approx(0.43320418437596453).epsilon(1e-9));
  CHECK(stats::beta_cdf(0.9, 2.5, 0.7) == doctest::Approx(0.6239321729007935).epsilon(1e-9));
  CHECK(stats::beta_cdf(0.01, 0.1, 3.0) == doctest::Approx(0.7274341927166094).epsilon(1e-9));
  CHECK(stats::beta_cdf(0.37, 1.0, 1.0) == doctest::Approx(0.37));
  CHECK(stats::chi_square_sf(7.815, 3) == doctest::Approx(0.049993902974883875).epsilon(1e-8));
  CHECK(stats::chi_square_sf(16.266, 3) == doctest::Approx(0.001000111604662117).epsilon(1e-8));
  CHECK(stats::chi_square_sf(150.0, 120) == doctest::Approx(0.03307348091130466).epsilon(1e-8));
  CHECK(stats::chi_square_sf(0.5, 1) == doctest::Approx(0.47950012218695337).epsilon(1e-8));
  CHECK(stats::ks_critical(1) == doctest::Approx(1.9494746035043753).epsilon(1e-9));
}

TEST_CASE("tensor and soft label invariants") {
  CHECK_THROWS_AS(Tensor({2, 3}, Tensor::Array::Zero(5)), InvalidArgument);
  Tensor t({3, 4, 5}, 0.25f);
  CHECK(t.size() == 60);
  CHECK(t.channels() == 3);
  CHECK(t.channel(1).rows() == 4);
  CHECK(spatial_of(t.shape()) == SpatialShape::image(4, 5));
  CHECK(spatial_of({1, 100}) == SpatialShape::signal(100));

  const auto one = SoftLabel::one_hot(2, 5);
  CHECK(one[2] == 1.0f);
  CHECK(one.probs().sum() == 1.0f);
  CHECK_THROWS_AS(SoftLabel::one_hot(5, 5), InvalidArgument);
  CHECK_THROWS_AS(SoftLabel(Eigen::VectorXf::Constant(3, 0.5f)), InvalidArgument);
  const auto mixed = SoftLabel::mix(SoftLabel::one_hot(1, 5), SoftLabel::one_hot(3, 5), 0.3);
  CHECK(mixed[1] == doctest::Approx(0.3));
  CHECK(mixed[3] == doctest::Approx(0.7));
  CHECK(std::abs(mixed.probs().sum() - 1.0f) < 1e-5f);
}
