// SPDX-License-Identifier: Apache-2.0
#include "mixforge/tensor.hpp"

#include <cmath>

namespace mixforge {

SoftLabel::SoftLabel(Vector probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw InvalidArgument("soft label must be non-empty");
  if (!probs_.allFinite() || (probs_.array() < 0.0f).any())
    throw InvalidArgument("soft label entries must be finite and non-negative");
  if (std::abs(probs_.cast<double>().sum() - 1.0) > 1e-5)
    throw InvalidArgument("soft label must sum to 1");
}

SoftLabel SoftLabel::one_hot(Index cls, Index num_classes) {
  if (num_classes < 1 || cls < 0 || cls >= num_classes)
    throw InvalidArgument("class index out of range");
  Vector v = Vector::Zero(num_classes);
  v[cls] = 1.0f;
  return SoftLabel(std::move(v));
}

SoftLabel SoftLabel::mix(const SoftLabel& a, const SoftLabel& b, double lam) {
  if (a.size() != b.size()) throw InvalidArgument("label length mismatch");
  Eigen::VectorXd mixed = lam * a.probs_.cast<double>() + (1.0 - lam) * b.probs_.cast<double>();
  SoftLabel out;
  out.probs_ = mixed.cast<float>();
  return out;
}

void check_unit_range(const Tensor& t, const std::string& what) {
  const auto& d = t.data();
  if (d.size() > 0 && (!d.allFinite() || (d < 0.0f).any() || (d > 1.0f).any()))
    throw InvalidArgument(what + " values must lie in [0, 1]");
}

}  // namespace mixforge
