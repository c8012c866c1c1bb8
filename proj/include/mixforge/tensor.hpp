// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mixforge {

using Index = Eigen::Index;

/// Raised for precondition violations on arguments (bad shapes, out-of-range
/// parameters, malformed recipes).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for filesystem and codec failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Index shape_size(const std::vector<Index>& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1},
                         [](Index a, Index b) { return a * b; });
}

/// Dense row-major tensor, channels first. Images are C x H x W, audio C x L,
/// spatial masks H x W or L.
template <typename Scalar>
class BasicTensor {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  BasicTensor() = default;

  explicit BasicTensor(std::vector<Index> shape, Scalar fill = Scalar(0))
      : shape_(std::move(shape)) {
    check_shape(shape_);
    data_ = Array::Constant(shape_size(shape_), fill);
  }

  BasicTensor(std::vector<Index> shape, Array data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (data_.size() != shape_size(shape_))
      throw InvalidArgument("tensor data length does not match shape");
  }

  const std::vector<Index>& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index i) const { return shape_.at(static_cast<std::size_t>(i)); }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Array& data() { return data_; }
  const Array& data() const { return data_; }

  Scalar& operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  /// Channel c viewed as a rows x cols matrix over the trailing dims.
  /// Rank-2 tensors (C x L) map to a 1 x L row.
  auto channel(Index c) {
    const auto [rows, cols] = plane_dims();
    return Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        data_.data() + c * rows * cols, rows, cols);
  }
  auto channel(Index c) const {
    const auto [rows, cols] = plane_dims();
    return Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        data_.data() + c * rows * cols, rows, cols);
  }

  Index channels() const { return rank() >= 2 ? shape_.front() : 1; }

  template <typename Other>
  BasicTensor<Other> cast() const {
    return BasicTensor<Other>(shape_, data_.template cast<Other>());
  }

  bool operator==(const BasicTensor& o) const {
    return shape_ == o.shape_ && (data_.size() == 0 || (data_ == o.data_).all());
  }

 private:
  static void check_shape(const std::vector<Index>& shape) {
    for (Index d : shape)
      if (d < 0) throw InvalidArgument("negative tensor dimension");
  }

  std::pair<Index, Index> plane_dims() const {
    if (rank() == 3) return {shape_[1], shape_[2]};
    if (rank() == 2) return {1, shape_[1]};
    return {1, size()};
  }

  std::vector<Index> shape_;
  Array data_;
};

using Tensor = BasicTensor<float>;

/// Spatial extent shared by samples and masks: H x W, or 1 x L for 1D data.
struct SpatialShape {
  Index height = 0;
  Index width = 0;
  bool one_dimensional = false;

  static SpatialShape image(Index h, Index w) { return {h, w, false}; }
  static SpatialShape signal(Index length) { return {1, length, true}; }

  Index count() const { return height * width; }
  std::vector<Index> dims() const {
    if (one_dimensional) return {width};
    return {height, width};
  }
  bool operator==(const SpatialShape&) const = default;
};

/// Spatial part of a sample tensor (C x H x W -> H x W, C x L -> L).
inline SpatialShape spatial_of(const std::vector<Index>& shape) {
  if (shape.size() == 3) return SpatialShape::image(shape[1], shape[2]);
  if (shape.size() == 2) return SpatialShape::signal(shape[1]);
  throw InvalidArgument("sample tensors must be C x H x W or C x L");
}

/// Probability vector over classes.
class SoftLabel {
 public:
  using Vector = Eigen::VectorXf;

  SoftLabel() = default;
  explicit SoftLabel(Vector probs);

  static SoftLabel one_hot(Index cls, Index num_classes);

  const Vector& probs() const { return probs_; }
  Index size() const { return probs_.size(); }
  float operator[](Index i) const { return probs_[i]; }

  /// lam * a + (1 - lam) * b, evaluated in double.
  static SoftLabel mix(const SoftLabel& a, const SoftLabel& b, double lam);

  bool operator==(const SoftLabel& o) const {
    return probs_.size() == o.probs_.size() && probs_ == o.probs_;
  }

 private:
  Vector probs_;
};

struct Sample {
  Tensor x;
  SoftLabel y;
};

/// Throws unless every value lies in [0, 1].
void check_unit_range(const Tensor& t, const std::string& what);

}  // namespace mixforge
