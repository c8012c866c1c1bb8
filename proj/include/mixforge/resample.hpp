// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>

#include "mixforge/tensor.hpp"

namespace mixforge {

enum class Interpolation { Bilinear, Nearest };

/// Corner-aligned source coordinate of output sample j: the first and last
/// output samples land exactly on the first and last inputs.
inline double aligned_position(Index j, Index out_size, Index in_size) {
  if (out_size <= 1) return 0.0;
  return static_cast<double>(j) * static_cast<double>(in_size - 1) / static_cast<double>(out_size - 1);
}

/// Resize the trailing spatial dims of a C x H x W (or C x L) tensor.
template <typename Scalar>
BasicTensor<Scalar> resize(const BasicTensor<Scalar>& src, Index out_h, Index out_w, Interpolation mode) {
  const SpatialShape in = spatial_of(src.shape());
  if (in.one_dimensional) out_h = 1;
  if (out_h < 1 || out_w < 1) throw InvalidArgument("resize target must be non-empty");
  const Index channels = src.channels();
  std::vector<Index> shape = in.one_dimensional ? std::vector<Index>{channels, out_w}
                                                : std::vector<Index>{channels, out_h, out_w};
  BasicTensor<Scalar> out(std::move(shape));

  for (Index c = 0; c < channels; ++c) {
    const auto s = src.channel(c);
    auto d = out.channel(c);
    for (Index y = 0; y < out_h; ++y) {
      const double py = aligned_position(y, out_h, in.height);
      for (Index x = 0; x < out_w; ++x) {
        const double px = aligned_position(x, out_w, in.width);
        if (mode == Interpolation::Nearest) {
          d(y, x) = s(std::llround(py), std::llround(px));
          continue;
        }
        const auto y0 = static_cast<Index>(std::floor(py));
        const auto x0 = static_cast<Index>(std::floor(px));
        const Index y1 = std::min(y0 + 1, in.height - 1);
        const Index x1 = std::min(x0 + 1, in.width - 1);
        const double ty = py - static_cast<double>(y0);
        const double tx = px - static_cast<double>(x0);
        const double top = (1.0 - tx) * s(y0, x0) + tx * s(y0, x1);
        const double bottom = (1.0 - tx) * s(y1, x0) + tx * s(y1, x1);
        d(y, x) = static_cast<Scalar>((1.0 - ty) * top + ty * bottom);
      }
    }
  }
  return out;
}

}  // namespace mixforge
