// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "mixforge/rng.hpp"
#include "mixforge/tensor.hpp"

namespace mixforge {

/// Complex DFT of a fixed length.
///
/// Lengths whose prime factors are all <= 7 run a recursive mixed-radix
/// Cooley-Tukey decomposition. Any other length goes through Bluestein's
/// chirp-z reformulation on a power-of-two inner plan. Transforms are
/// unnormalized; `inverse` computes conj(forward(conj(x))).
template <typename Scalar>
class FftPlan {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  explicit FftPlan(Index n) : n_(n) {
    if (n < 1) throw InvalidArgument("FFT length must be >= 1");
    Index rest = n;
    for (Index p : {Index{4}, Index{2}, Index{3}, Index{5}, Index{7}}) {
      while (rest % p == 0) {
        factors_.push_back(p);
        rest /= p;
      }
    }
    if (rest == 1) {
      twiddles_.resize(static_cast<std::size_t>(n));
      for (Index k = 0; k < n; ++k) twiddles_[k] = unit_root(k, n);
    } else {
      factors_.clear();
      setup_bluestein();
    }
  }

  Index size() const { return n_; }
  bool uses_bluestein() const { return inner_ != nullptr; }

  Vector forward(const Vector& in) const {
    if (in.size() != n_) throw InvalidArgument("FFT input length mismatch");
    Vector out(n_);
    if (n_ == 1) {
      out = in;
    } else if (inner_) {
      bluestein(in, out);
    } else {
      std::vector<Complex> scratch;
      work(out.data(), in.data(), 1, 0, scratch);
    }
    return out;
  }

  Vector inverse(const Vector& in) const { return forward(in.conjugate()).conjugate(); }

 private:
  static Complex unit_root(Index k, Index n) {
    // exp(-2 pi i k / n), evaluated in long double
    const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) /
                              static_cast<long double>(n);
    return Complex(static_cast<Scalar>(std::cos(angle)), static_cast<Scalar>(std::sin(angle)));
  }

  void work(Complex* out, const Complex* in, Index fstride, std::size_t stage,
            std::vector<Complex>& scratch) const {
    const Index p = factors_[stage];
    Index m = n_;
    for (std::size_t s = 0; s <= stage; ++s) m /= factors_[s];

    if (m == 1) {
      for (Index j = 0; j < p; ++j) out[j] = in[j * fstride];
    } else {
      for (Index j = 0; j < p; ++j) work(out + j * m, in + j * fstride, fstride * p, stage + 1, scratch);
    }

    scratch.resize(static_cast<std::size_t>(p));
    for (Index u = 0; u < m; ++u) {
      for (Index q = 0; q < p; ++q) scratch[q] = out[u + q * m];
      for (Index q1 = 0; q1 < p; ++q1) {
        const Index k = u + q1 * m;
        Index tw = 0;
        Complex acc = scratch[0];
        for (Index q = 1; q < p; ++q) {
          tw += fstride * k;
          tw %= n_;
          acc += scratch[q] * twiddles_[tw];
        }
        out[k] = acc;
      }
    }
  }

  void setup_bluestein() {
    Index m = 1;
    while (m < 2 * n_ - 1) m <<= 1;
    inner_ = std::make_shared<FftPlan>(m);
    chirp_.resize(n_);
    const long double pi = std::numbers::pi_v<long double>;
    for (Index k = 0; k < n_; ++k) {
      // k^2 mod 2n keeps the angle small for large k.
      const Index k2 = (k * k) % (2 * n_);
      const long double angle = -pi * static_cast<long double>(k2) / static_cast<long double>(n_);
      chirp_[k] = Complex(static_cast<Scalar>(std::cos(angle)), static_cast<Scalar>(std::sin(angle)));
    }
    Vector b = Vector::Zero(m);
    b[0] = std::conj(chirp_[0]);
    for (Index k = 1; k < n_; ++k) {
      b[k] = std::conj(chirp_[k]);
      b[m - k] = std::conj(chirp_[k]);
    }
    kernel_ = inner_->forward(b);
  }

  void bluestein(const Vector& in, Vector& out) const {
    const Index m = inner_->size();
    Vector a = Vector::Zero(m);
    a.head(n_) = in.cwiseProduct(chirp_);
    Vector conv = inner_->inverse(inner_->forward(a).cwiseProduct(kernel_));
    out = conv.head(n_).cwiseProduct(chirp_) / static_cast<Scalar>(m);
  }

  Index n_;
  std::vector<Index> factors_;
  std::vector<Complex> twiddles_;
  std::shared_ptr<FftPlan> inner_;
  Vector chirp_;
  Vector kernel_;
};

/// Half-spectrum of a real 1D or 2D field. For spatial dims (H, W) the
/// coefficients are H x (W/2 + 1); for a length-L signal, 1 x (L/2 + 1).
template <typename Scalar>
struct Spectrum {
  using Complex = std::complex<Scalar>;
  using Coeffs = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::vector<Index> shape;
  Coeffs coeffs;

  Index rows() const { return shape.size() == 2 ? shape[0] : 1; }
  Index cols() const { return shape.back(); }

  /// Full-spectrum coefficient at (ky, kx), filling the redundant half from
  /// Hermitian symmetry.
  Complex at(Index ky, Index kx) const {
    const Index h = rows(), w = cols();
    if (kx <= w / 2) return coeffs(ky, kx);
    return std::conj(coeffs((h - ky) % h, w - kx));
  }

  bool well_formed() const {
    if (shape.empty() || shape.size() > 2) return false;
    for (Index d : shape)
      if (d < 1) return false;
    return coeffs.rows() == rows() && coeffs.cols() == cols() / 2 + 1;
  }
};

namespace detail {

template <typename Scalar>
void fft_columns(typename Spectrum<Scalar>::Coeffs& c, bool inverse) {
  if (c.rows() <= 1) return;
  const FftPlan<Scalar> plan(c.rows());
  for (Index j = 0; j < c.cols(); ++j) {
    typename FftPlan<Scalar>::Vector col = c.col(j);
    c.col(j) = inverse ? plan.inverse(col) : plan.forward(col);
  }
}

}  // namespace detail

template <typename Scalar>
Spectrum<Scalar> forward_real(const BasicTensor<Scalar>& field) {
  if (field.rank() < 1 || field.rank() > 2) throw InvalidArgument("forward_real expects rank 1 or 2");
  if (field.empty()) throw InvalidArgument("forward_real of an empty field");
  using Complex = std::complex<Scalar>;
  Spectrum<Scalar> spec;
  spec.shape = field.shape();
  const Index h = spec.rows(), w = spec.cols(), half = w / 2 + 1;
  spec.coeffs.resize(h, half);

  const FftPlan<Scalar> row_plan(w);
  typename FftPlan<Scalar>::Vector row(w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) row[x] = Complex(field[y * w + x], Scalar(0));
    spec.coeffs.row(y) = row_plan.forward(row).head(half).transpose();
  }
  detail::fft_columns<Scalar>(spec.coeffs, false);
  return spec;
}

template <typename Scalar>
BasicTensor<Scalar> inverse_real(const Spectrum<Scalar>& spec) {
  if (!spec.well_formed()) throw InvalidArgument("spectrum coefficients do not match its shape");
  using Complex = std::complex<Scalar>;
  const Index h = spec.rows(), w = spec.cols(), half = w / 2 + 1;
  typename Spectrum<Scalar>::Coeffs c = spec.coeffs;
  detail::fft_columns<Scalar>(c, true);

  BasicTensor<Scalar> out(spec.shape);
  const FftPlan<Scalar> row_plan(w);
  typename FftPlan<Scalar>::Vector row(w);
  const Scalar norm = Scalar(1) / static_cast<Scalar>(h * w);
  for (Index y = 0; y < h; ++y) {
    for (Index k = 0; k < half; ++k) row[k] = c(y, k);
    for (Index k = half; k < w; ++k) row[k] = std::conj(c(y, w - k));
    // DC and Nyquist bins of a real signal are real.
    row[0] = Complex(row[0].real(), Scalar(0));
    if (w % 2 == 0) row[w / 2] = Complex(row[w / 2].real(), Scalar(0));
    const auto values = row_plan.inverse(row);
    for (Index x = 0; x < w; ++x) out[y * w + x] = values[x].real() * norm;
  }
  return out;
}

/// Normalized frequency magnitude of bin (ky, kx) for spatial dims
/// (h, w): Euclidean norm of min(k, n - k) / n per axis.
inline double frequency_norm(Index ky, Index kx, Index h, Index w) {
  const double fy = h > 1 ? static_cast<double>(std::min(ky, h - ky)) / static_cast<double>(h) : 0.0;
  const double fx = static_cast<double>(std::min(kx, w - kx)) / static_cast<double>(w);
  return std::sqrt(fy * fy + fx * fx);
}

/// Random real field with a 1 / max(|f|, f_min)^decay amplitude envelope,
/// normalized to zero mean and unit variance. f_min = 1 / max(dims).
template <typename Scalar = double>
BasicTensor<Scalar> sample_low_freq_field(Rng& rng, const SpatialShape& shape, double decay) {
  if (!(decay > 0.0) || !std::isfinite(decay)) throw InvalidArgument("decay must be finite and positive");
  if (shape.width < 2 || (!shape.one_dimensional && shape.height < 2))
    throw InvalidArgument("low-frequency field dims must be >= 2");
  using Complex = std::complex<Scalar>;
  Spectrum<Scalar> spec;
  spec.shape = shape.dims();
  const Index h = spec.rows(), w = spec.cols(), half = w / 2 + 1;
  spec.coeffs.resize(h, half);
  const double f_min = 1.0 / static_cast<double>(std::max(h, w));
  for (Index ky = 0; ky < h; ++ky) {
    for (Index kx = 0; kx < half; ++kx) {
      const double scale = std::pow(std::max(frequency_norm(ky, kx, h, w), f_min), -decay);
      const double re = sample_normal(rng);
      const double im = sample_normal(rng);
      spec.coeffs(ky, kx) = Complex(static_cast<Scalar>(re * scale), static_cast<Scalar>(im * scale));
    }
  }
  BasicTensor<Scalar> field = inverse_real(spec);
  auto& d = field.data();
  const double mean = d.template cast<double>().mean();
  Eigen::ArrayXd centered = d.template cast<double>() - mean;
  const double var = centered.square().mean();
  if (var > 0.0) centered /= std::sqrt(var);
  d = centered.cast<Scalar>();
  return field;
}

}  // namespace mixforge
