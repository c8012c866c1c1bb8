// SPDX-License-Identifier: Apache-2.0
#include "mixforge/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixforge/fft.hpp"

namespace mixforge {

namespace {

void check_open_unit(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) throw InvalidArgument(std::string(what) + " must lie in (0, 1)");
}

void check_shape(const SpatialShape& shape) {
  if (shape.width < 1 || shape.height < 1 || (shape.one_dimensional && shape.height != 1))
    throw InvalidArgument("invalid spatial shape");
}

MixMask all_ones(const SpatialShape& shape, MaskGeometry geometry) {
  return MixMask{Tensor(shape.dims(), 1.0f), shape, 1.0, geometry};
}

Index uniform_offset(Rng& rng, Index extent) {
  return static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(extent)));
}

void fill_rect(Tensor& mask, Index width, Index x0, Index y0, Index w, Index h, float value) {
  for (Index y = y0; y < y0 + h; ++y)
    for (Index x = x0; x < x0 + w; ++x) mask[y * width + x] = value;
}

double realized(const Tensor& mask) {
  return static_cast<double>((mask.data() > 0.5f).count()) / static_cast<double>(mask.size());
}

Index ceil_sqrt(Index a) {
  auto s = static_cast<Index>(std::sqrt(static_cast<double>(a)));
  while (s * s < a) ++s;
  while (s > 0 && (s - 1) * (s - 1) >= a) --s;
  return s;
}

}  // namespace

std::string geometry_kind(const MaskGeometry& g) {
  switch (g.index()) {
    case 0: return "rect";
    case 1: return "interval";
    case 2: return "freeform";
    default: return "paste";
  }
}

Index MixMask::ones() const { return (mask.data() > 0.5f).count(); }

MixMask rect_mask(Rng& rng, const SpatialShape& shape, double lam_target, RectPlacement placement) {
  check_open_unit(lam_target, "lam_target");
  check_shape(shape);
  const double side = std::sqrt(1.0 - lam_target);

  if (shape.one_dimensional) {
    const Index width = shape.width;
    const Index len = std::llround(static_cast<double>(width) * (1.0 - lam_target));
    if (len == 0) return all_ones(shape, IntervalGeometry{0, 0});
    Index start, end;
    if (placement == RectPlacement::Inside) {
      start = uniform_offset(rng, width - len + 1);
      end = start + len;
    } else {
      const Index c = uniform_offset(rng, width);
      start = std::clamp(c - len / 2, Index{0}, width);
      end = std::clamp(c - len / 2 + len, Index{0}, width);
    }
    if (end <= start) return all_ones(shape, IntervalGeometry{0, 0});
    MixMask m = all_ones(shape, IntervalGeometry{start, end - start});
    fill_rect(m.mask, width, start, 0, end - start, 1, 0.0f);
    m.lam = realized(m.mask);
    return m;
  }

  const Index cw = std::llround(static_cast<double>(shape.width) * side);
  const Index ch = std::llround(static_cast<double>(shape.height) * side);
  if (cw == 0 || ch == 0) return all_ones(shape, RectGeometry{});

  RectGeometry r;
  if (placement == RectPlacement::Inside) {
    r.x0 = uniform_offset(rng, shape.width - cw + 1);
    r.y0 = uniform_offset(rng, shape.height - ch + 1);
    r.w = cw;
    r.h = ch;
  } else {
    const Index cx = uniform_offset(rng, shape.width);
    const Index cy = uniform_offset(rng, shape.height);
    const Index x0 = std::clamp(cx - cw / 2, Index{0}, shape.width);
    const Index x1 = std::clamp(cx - cw / 2 + cw, Index{0}, shape.width);
    const Index y0 = std::clamp(cy - ch / 2, Index{0}, shape.height);
    const Index y1 = std::clamp(cy - ch / 2 + ch, Index{0}, shape.height);
    if (x1 <= x0 || y1 <= y0) return all_ones(shape, RectGeometry{});
    r = RectGeometry{x0, y0, x1 - x0, y1 - y0};
  }
  MixMask m = all_ones(shape, r);
  fill_rect(m.mask, shape.width, r.x0, r.y0, r.w, r.h, 0.0f);
  m.lam = realized(m.mask);
  return m;
}

MixMask threshold_top_k(const BasicTensor<double>& field, const SpatialShape& shape, double lam_target) {
  check_open_unit(lam_target, "lam_target");
  const Index n = shape.count();
  if (field.size() != n) throw InvalidArgument("field size does not match mask shape");
  // The relative nudge keeps exact products like 0.3 * 10 from ceiling to 4.
  auto k = static_cast<Index>(std::ceil(lam_target * static_cast<double>(n) * (1.0 - 1e-12)));
  k = std::clamp(k, Index{1}, n);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto& v = field.data();
  const auto before = [&v](Index a, Index b) { return v[a] > v[b] || (v[a] == v[b] && a < b); };
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), before);

  MixMask m{Tensor(shape.dims(), 0.0f), shape, 0.0, FreeformGeometry{}};
  for (Index i = 0; i < k; ++i) m.mask[order[static_cast<std::size_t>(i)]] = 1.0f;
  m.lam = static_cast<double>(k) / static_cast<double>(n);
  return m;
}

MixMask fourier_mask(Rng& rng, const SpatialShape& shape, double lam_target, double decay) {
  check_open_unit(lam_target, "lam_target");
  check_shape(shape);
  const BasicTensor<double> field = sample_low_freq_field<double>(rng, shape, decay);
  return threshold_top_k(field, shape, lam_target);
}

MixMask paste_region(Rng& rng, const SpatialShape& shape, double lam_target) {
  check_open_unit(lam_target, "lam_target");
  check_shape(shape);
  PasteGeometry p;
  if (shape.one_dimensional) {
    p.scale = 1.0 - lam_target;
    p.w = std::clamp<Index>(std::llround(p.scale * static_cast<double>(shape.width)), 1, shape.width);
    p.h = 1;
    p.x0 = uniform_offset(rng, shape.width - p.w + 1);
  } else {
    p.scale = std::sqrt(1.0 - lam_target);
    p.w = std::clamp<Index>(std::llround(p.scale * static_cast<double>(shape.width)), 1, shape.width);
    p.h = std::clamp<Index>(std::llround(p.scale * static_cast<double>(shape.height)), 1, shape.height);
    p.x0 = uniform_offset(rng, shape.width - p.w + 1);
    p.y0 = uniform_offset(rng, shape.height - p.h + 1);
  }
  MixMask m = all_ones(shape, p);
  fill_rect(m.mask, shape.width, p.x0, p.y0, p.w, p.h, 0.0f);
  m.lam = realized(m.mask);
  return m;
}

MixMask occlusion_mask(Rng& rng, const SpatialShape& shape, double occluded_fraction, int blocks) {
  check_open_unit(occluded_fraction, "occluded_fraction");
  check_shape(shape);
  if (blocks < 1) throw InvalidArgument("occlusion block count must be >= 1");
  const Index n = shape.count();
  const Index total = std::llround(occluded_fraction * static_cast<double>(n));
  if (total == 0)
    return all_ones(shape, shape.one_dimensional ? MaskGeometry{IntervalGeometry{}} : MaskGeometry{RectGeometry{}});

  MixMask m = all_ones(shape, FreeformGeometry{});
  for (int b = 0; b < blocks; ++b) {
    const Index area = total / blocks + (b < total % blocks ? 1 : 0);
    if (area == 0) continue;
    if (shape.one_dimensional) {
      const Index start = uniform_offset(rng, shape.width - area + 1);
      fill_rect(m.mask, shape.width, start, 0, area, 1, 0.0f);
      if (blocks == 1) m.geometry = IntervalGeometry{start, area};
      continue;
    }
    // Near-square block: full rows of width w plus one partial row.
    const Index w = std::min(shape.width, std::max(ceil_sqrt(area), (area + shape.height - 1) / shape.height));
    const Index full_rows = area / w;
    const Index rest = area % w;
    const Index rows = full_rows + (rest > 0 ? 1 : 0);
    const Index x0 = uniform_offset(rng, shape.width - w + 1);
    const Index y0 = uniform_offset(rng, shape.height - rows + 1);
    fill_rect(m.mask, shape.width, x0, y0, w, full_rows, 0.0f);
    fill_rect(m.mask, shape.width, x0, y0 + full_rows, rest, rest > 0 ? 1 : 0, 0.0f);
    if (blocks == 1) m.geometry = RectGeometry{x0, y0, w, rows};
  }
  m.lam = realized(m.mask);
  return m;
}

}  // namespace mixforge
