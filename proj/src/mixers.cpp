// SPDX-License-Identifier: Apache-2.0
#include "mixforge/mixers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mixforge {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Mixup: return "mixup";
    case Method::CutMix: return "cutmix";
    case Method::ResizeMix: return "resizemix";
    case Method::Fmix: return "fmix";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Method m : kAllMethods)
    if (lower == method_name(m)) return m;
  throw InvalidArgument("unknown mixing method '" + std::string(name) + "'");
}

void MixerConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be finite and positive");
  if (!(fmix_decay > 0.0) || !std::isfinite(fmix_decay))
    throw InvalidArgument("fmix_decay must be finite and positive");
}

void check_compatible(const Sample& a, const Sample& b) {
  if (a.x.shape() != b.x.shape()) throw InvalidArgument("sample tensor shapes differ");
  if (a.y.size() != b.y.size()) throw InvalidArgument("sample label lengths differ");
  spatial_of(a.x.shape());
}

double draw_lambda(Method m, Rng& rng, const MixerConfig& cfg) {
  cfg.validate();
  if (m == Method::CutMix && cfg.cutmix_lambda == LambdaLaw::Uniform) {
    // Mask generators need an open interval; 0 has probability 2^-53.
    double u;
    do {
      u = sample_uniform(rng, 0.0, 1.0);
    } while (u == 0.0);
    return u;
  }
  return sample_beta(rng, cfg.alpha);
}

MixResult mixup_with_lambda(const Sample& a, const Sample& b, double lam) {
  check_compatible(a, b);
  if (!(lam >= 0.0 && lam <= 1.0)) throw InvalidArgument("mixup lambda must lie in [0, 1]");
  MixResult r;
  Eigen::ArrayXf mixed =
      (lam * a.x.data().cast<double>() + (1.0 - lam) * b.x.data().cast<double>()).cast<float>();
  r.x = Tensor(a.x.shape(), std::move(mixed));
  r.y = SoftLabel::mix(a.y, b.y, lam);
  r.lam = lam;
  r.lam_target = lam;
  r.method = Method::Mixup;
  return r;
}

Tensor apply_mask(const Tensor& a, const Tensor& b, const MixMask& mask) {
  if (a.shape() != b.shape()) throw InvalidArgument("sample tensor shapes differ");
  if (spatial_of(a.shape()) != mask.shape) throw InvalidArgument("mask shape does not match sample");
  Tensor out = a;
  const Index plane = mask.shape.count();
  const auto keep = mask.mask.data() > 0.5f;
  for (Index c = 0; c < a.channels(); ++c) {
    out.data().segment(c * plane, plane) =
        keep.select(a.data().segment(c * plane, plane), b.data().segment(c * plane, plane));
  }
  return out;
}

Tensor paste_resized(const Tensor& a, const Tensor& b, const PasteGeometry& patch, Interpolation mode) {
  if (a.shape() != b.shape()) throw InvalidArgument("sample tensor shapes differ");
  const SpatialShape shape = spatial_of(a.shape());
  if (patch.x0 < 0 || patch.y0 < 0 || patch.x0 + patch.w > shape.width || patch.y0 + patch.h > shape.height)
    throw InvalidArgument("paste patch exceeds the image");
  const Tensor resized = resize(b, patch.h, patch.w, mode);
  Tensor out = a;
  for (Index c = 0; c < a.channels(); ++c)
    out.channel(c).block(patch.y0, patch.x0, patch.h, patch.w) = resized.channel(c);
  return out;
}

MixResult apply_mixer(Method m, const Sample& a, const Sample& b, double lam_target, Rng& rng,
                      const MixerConfig& cfg) {
  cfg.validate();
  if (m == Method::Mixup) return mixup_with_lambda(a, b, lam_target);

  check_compatible(a, b);
  const SpatialShape shape = spatial_of(a.x.shape());
  MixMask mask;
  switch (m) {
    case Method::CutMix: mask = rect_mask(rng, shape, lam_target, cfg.rect_placement); break;
    case Method::ResizeMix: mask = paste_region(rng, shape, lam_target); break;
    default: mask = fourier_mask(rng, shape, lam_target, cfg.fmix_decay); break;
  }

  MixResult r;
  r.x = m == Method::ResizeMix
            ? paste_resized(a.x, b.x, std::get<PasteGeometry>(mask.geometry), cfg.interpolation)
            : apply_mask(a.x, b.x, mask);
  r.y = SoftLabel::mix(a.y, b.y, mask.lam);
  r.lam = mask.lam;
  r.lam_target = lam_target;
  r.method = m;
  r.geometry = mask.geometry;
  return r;
}

MixResult mixup(const Sample& a, const Sample& b, Rng& rng, const MixerConfig& cfg) {
  return apply_mixer(Method::Mixup, a, b, draw_lambda(Method::Mixup, rng, cfg), rng, cfg);
}

MixResult cutmix(const Sample& a, const Sample& b, Rng& rng, const MixerConfig& cfg) {
  return apply_mixer(Method::CutMix, a, b, draw_lambda(Method::CutMix, rng, cfg), rng, cfg);
}

MixResult resizemix(const Sample& a, const Sample& b, Rng& rng, const MixerConfig& cfg) {
  return apply_mixer(Method::ResizeMix, a, b, draw_lambda(Method::ResizeMix, rng, cfg), rng, cfg);
}

MixResult fmix(const Sample& a, const Sample& b, Rng& rng, const MixerConfig& cfg) {
  return apply_mixer(Method::Fmix, a, b, draw_lambda(Method::Fmix, rng, cfg), rng, cfg);
}

}  // namespace mixforge
