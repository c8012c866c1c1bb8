// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mixforge/masks.hpp"
#include "mixforge/resample.hpp"
#include "mixforge/rng.hpp"
#include "mixforge/tensor.hpp"

namespace mixforge {

enum class Method { Mixup, CutMix, ResizeMix, Fmix };

inline constexpr Method kAllMethods[] = {Method::Mixup, Method::CutMix, Method::ResizeMix, Method::Fmix};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// Linear ("l") vs mask ("m") mixed mode.
inline bool is_mask_mode(Method m) { return m != Method::Mixup; }

enum class LambdaLaw { Beta, Uniform };

struct MixerConfig {
  double alpha = 1.0;
  double fmix_decay = 3.0;
  Interpolation interpolation = Interpolation::Bilinear;
  /// CutMix draws lam ~ U(0, 1) by default; Beta(alpha, alpha) on request.
  LambdaLaw cutmix_lambda = LambdaLaw::Uniform;
  RectPlacement rect_placement = RectPlacement::Inside;

  void validate() const;
  bool operator==(const MixerConfig&) const = default;
};

struct MixResult {
  Tensor x;
  SoftLabel y;
  /// Realized weight of the first sample, used for the label.
  double lam = 1.0;
  /// Drawn (or forced) target before mask rounding.
  double lam_target = 1.0;
  Method method = Method::Mixup;
  std::optional<MaskGeometry> geometry;
};

/// Draw the mixing ratio target for `m` from its nominal law.
double draw_lambda(Method m, Rng& rng, const MixerConfig& cfg);

/// Mix with a given target ratio. Mixup uses it directly (lam in [0, 1]);
/// mask modes need lam_target in (0, 1) and consume `rng` for placement.
MixResult apply_mixer(Method m, const Sample& a, const Sample& b, double lam_target, Rng& rng,
                      const MixerConfig& cfg);

MixResult mixup(const Sample& a, const Sample& b, Rng& rng, const MixerConfig& cfg);
MixResult cutmix(const Sample& a, const Sample& b, Rng& rng, const MixerConfig& cfg);
MixResult resizemix(const Sample& a, const Sample& b, Rng& rng, const MixerConfig& cfg);
MixResult fmix(const Sample& a, const Sample& b, Rng& rng, const MixerConfig& cfg);

/// lam * a + (1 - lam) * b for tensor and label.
MixResult mixup_with_lambda(const Sample& a, const Sample& b, double lam);

/// mask * a + (1 - mask) * b, mask broadcast over channels.
Tensor apply_mask(const Tensor& a, const Tensor& b, const MixMask& mask);

/// Copy of `a` with `b` resized into the paste geometry.
Tensor paste_resized(const Tensor& a, const Tensor& b, const PasteGeometry& patch, Interpolation mode);

void check_compatible(const Sample& a, const Sample& b);

}  // namespace mixforge
