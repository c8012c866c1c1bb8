// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>

#include "mixforge/fft.hpp"
#include "oracles.hpp"

using namespace mixforge;
using cd = std::complex<double>;

namespace {

BasicTensor<double> random_field(std::vector<Index> shape, std::uint64_t seed) {
  Rng rng(seed);
  BasicTensor<double> t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) t[i] = sample_normal(rng);
  return t;
}

std::vector<double> as_vector(const BasicTensor<double>& t) {
  return std::vector<double>(t.data().data(), t.data().data() + t.size());
}

double max_abs_diff(const BasicTensor<double>& a, const BasicTensor<double>& b) {
  return (a.data() - b.data()).abs().maxCoeff();
}

}  // namespace

TEST_CASE("complex plan matches the naive DFT for every length up to 64") {
  for (Index n = 1; n <= 64; ++n) {
    CAPTURE(n);
    Rng rng(static_cast<std::uint64_t>(n));
    FftPlan<double>::Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = cd(sample_normal(rng), sample_normal(rng));
    // Naive complex DFT inline; the oracle only handles real input.
    const auto y = FftPlan<double>(n).forward(x);
    double err = 0.0;
    for (Index k = 0; k < n; ++k) {
      cd acc = 0.0;
      for (Index j = 0; j < n; ++j)
        acc += x[j] * std::polar(1.0, -2.0 * M_PI * static_cast<double>((j * k) % n) / static_cast<double>(n));
      err = std::max(err, std::abs(acc - y[k]));
    }
    CHECK(err < 1e-9 * static_cast<double>(n));
    const FftPlan<double>::Vector back = FftPlan<double>(n).inverse(y) / static_cast<double>(n);
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-12 * static_cast<double>(n));
  }
}

TEST_CASE("Bluestein path covers lengths with large prime factors") {
  CHECK_FALSE(FftPlan<double>(2 * 3 * 5 * 7 * 4).uses_bluestein());
  CHECK(FftPlan<double>(11).uses_bluestein());
  CHECK(FftPlan<double>(2 * 13).uses_bluestein());
  CHECK_THROWS_AS(FftPlan<double>(0), InvalidArgument);
}

TEST_CASE("real 2D transform against the naive DFT") {
  Rng shapes(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Index h = 1 + static_cast<Index>(uniform_index(shapes, 24));
    const Index w = 1 + static_cast<Index>(uniform_index(shapes, 24));
    CAPTURE(h);
    CAPTURE(w);
    const auto field = random_field({h, w}, 1000 + static_cast<std::uint64_t>(trial));
    const auto spec = forward_real(field);
    REQUIRE(spec.well_formed());
    const auto ref = oracle::naive_dft(as_vector(field), h, w);
    double err = 0.0;
    for (Index ky = 0; ky < h; ++ky)
      for (Index kx = 0; kx < w; ++kx) err = std::max(err, std::abs(spec.at(ky, kx) - ref[ky * w + kx]));
    CHECK(err < 1e-9 * static_cast<double>(h * w));
  }
}

TEST_CASE("round trip and Parseval on every size from 2 to 64") {
  for (Index n = 2; n <= 64; ++n) {
    CAPTURE(n);
    for (const auto& shape : {std::vector<Index>{n}, std::vector<Index>{n, n}, std::vector<Index>{n, n / 2 + 2}}) {
      const auto field = random_field(shape, static_cast<std::uint64_t>(n * 31 + static_cast<Index>(shape.size())));
      const auto spec = forward_real(field);
      CHECK(max_abs_diff(inverse_real(spec), field) < 1e-4);

      const Index h = spec.rows(), w = spec.cols();
      double spatial = field.data().square().sum(), freq = 0.0;
      for (Index ky = 0; ky < h; ++ky)
        for (Index kx = 0; kx < w; ++kx) freq += std::norm(spec.at(ky, kx));
      freq /= static_cast<double>(h * w);
      CHECK(std::abs(freq - spatial) / spatial < 1e-4);
    }
  }
}

TEST_CASE("float transforms agree with double to single precision") {
  const auto field = random_field({17, 30}, 5);
  const auto back = inverse_real(forward_real(field.cast<float>()));
  CHECK((back.cast<double>().data() - field.data()).abs().maxCoeff() < 1e-4);
}

TEST_CASE("malformed inputs are rejected") {
  CHECK_THROWS_AS(forward_real(BasicTensor<double>({2, 2, 2})), InvalidArgument);
  Spectrum<double> bad;
  bad.shape = {4, 4};
  bad.coeffs.resize(4, 4);
  CHECK_THROWS_AS(inverse_real(bad), InvalidArgument);
}

TEST_CASE("low-frequency field") {
  SUBCASE("normalized to zero mean and unit variance") {
    Rng rng(8);
    for (const auto& s : {SpatialShape::image(32, 32), SpatialShape::image(7, 40), SpatialShape::signal(1000)}) {
      const auto f = sample_low_freq_field(rng, s, 3.0);
      CHECK(f.size() == s.count());
      CHECK(std::abs(f.data().mean()) < 1e-9);
      CHECK(std::abs((f.data() - f.data().mean()).square().mean() - 1.0) < 1e-9);
    }
  }
  SUBCASE("energy concentrates at low frequencies as decay grows") {
    const auto low_share = [](double decay) {
      double low = 0, total = 0;
      for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(s);
        const auto spec = forward_real(sample_low_freq_field(rng, SpatialShape::image(32, 32), decay));
        for (Index ky = 0; ky < 32; ++ky)
          for (Index kx = 0; kx < 32; ++kx) {
            const double e = std::norm(spec.at(ky, kx));
            total += e;
            if (frequency_norm(ky, kx, 32, 32) <= 0.1) low += e;
          }
      }
      return low / total;
    };
    const double s1 = low_share(1.0), s3 = low_share(3.0);
    CHECK(s3 > s1);
    CHECK(s3 > 0.8);
  }
  SUBCASE("deterministic per seed") {
    Rng a(4), b(4);
    CHECK(sample_low_freq_field(a, SpatialShape::image(16, 16), 3.0) ==
          sample_low_freq_field(b, SpatialShape::image(16, 16), 3.0));
  }
  SUBCASE("invalid arguments") {
    Rng rng(0);
    CHECK_THROWS_AS(sample_low_freq_field(rng, SpatialShape::image(1, 8), 3.0), InvalidArgument);
    CHECK_THROWS_AS(sample_low_freq_field(rng, SpatialShape::image(8, 8), 0.0), InvalidArgument);
    CHECK_THROWS_AS(sample_low_freq_field(rng, SpatialShape::image(8, 8), NAN), InvalidArgument);
  }
}
