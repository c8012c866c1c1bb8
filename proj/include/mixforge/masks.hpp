// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>

#include "mixforge/rng.hpp"
#include "mixforge/tensor.hpp"

namespace mixforge {

struct RectGeometry {
  Index x0 = 0, y0 = 0, w = 0, h = 0;
  bool operator==(const RectGeometry&) const = default;
};

struct IntervalGeometry {
  Index start = 0, len = 0;
  bool operator==(const IntervalGeometry&) const = default;
};

struct FreeformGeometry {
  bool operator==(const FreeformGeometry&) const = default;
};

/// Pasted patch; for 1D signals y0 = 0 and h = 1.
struct PasteGeometry {
  Index x0 = 0, y0 = 0, w = 0, h = 0;
  double scale = 0.0;
  bool operator==(const PasteGeometry&) const = default;
};

using MaskGeometry = std::variant<RectGeometry, IntervalGeometry, FreeformGeometry, PasteGeometry>;

std::string geometry_kind(const MaskGeometry& g);

/// Binary spatial mask. 1 marks elements kept from the first sample, 0
/// elements taken from the second. `lam` is always the realized fraction of
/// ones.
struct MixMask {
  Tensor mask;
  SpatialShape shape;
  double lam = 1.0;
  MaskGeometry geometry;

  Index ones() const;
};

/// Where the CutMix rectangle may land.
enum class RectPlacement {
  /// Uniform over placements fully inside the image; realized lam only
  /// deviates from the target by side rounding.
  Inside,
  /// Centre uniform over the image, rectangle clipped to the bounds.
  CenterClipped,
};

/// CutMix box of side sqrt(1 - lam_target) per axis (interval of length
/// (1 - lam_target) * L for 1D). Zero-area boxes give the all-ones mask.
MixMask rect_mask(Rng& rng, const SpatialShape& shape, double lam_target,
                  RectPlacement placement = RectPlacement::Inside);

/// Thresholded low-frequency field: the top ceil(lam_target * N) values
/// become ones, ties broken by flat index.
MixMask fourier_mask(Rng& rng, const SpatialShape& shape, double lam_target, double decay);

/// Top-k threshold of an existing field; `fourier_mask` draws the field and
/// calls this.
MixMask threshold_top_k(const BasicTensor<double>& field, const SpatialShape& shape, double lam_target);

/// ResizeMix patch of scale sqrt(1 - lam_target) (1D: length fraction
/// 1 - lam_target), at least one element, placed fully inside.
MixMask paste_region(Rng& rng, const SpatialShape& shape, double lam_target);

/// Zero-filled occlusion blocks covering round(fraction * N) elements in
/// total, split across `blocks` near-square blocks placed fully inside.
/// Blocks may overlap when blocks > 1.
MixMask occlusion_mask(Rng& rng, const SpatialShape& shape, double occluded_fraction, int blocks = 1);

}  // namespace mixforge
