#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "frechetcp/metric_space.hpp"

namespace frechetcp {

/// An immutable, homogeneous sequence Y_1..Y_n of objects from one space.
///
/// Objects are kept as one contiguous n x p block of stored coordinates so the
/// scan engine and the bootstrap can work on them without per-object
/// indirection. Every object has been validated before it enters a sequence.
class ObjectSequence {
 public:
  /// Throws PreconditionError when fewer than two objects are given and
  /// DimensionError when spaces or shapes differ.
  explicit ObjectSequence(std::span<const MetricObject> items);

  Space space() const { return space_; }
  std::size_t size() const { return n_; }
  /// M, r, or d.
  std::size_t shape() const { return shape_; }
  /// Stored coordinates per object (M, r*r, or d).
  std::size_t coord_dim() const { return p_; }
  double metric_weight() const { return weight_; }
  /// Common matrix kind, or general when kinds differ.
  MatrixKind matrix_kind() const { return kind_; }

  std::span<const double> coords(std::size_t i) const { return {data_.data() + i * p_, p_}; }
  std::span<const double> data() const { return data_; }

  MetricObject item(std::size_t i) const;
  std::vector<MetricObject> items() const;

  /// Objects [begin, end), 0-based.
  ObjectSequence subsequence(std::size_t begin, std::size_t end) const;
  /// Objects at the given 0-based indices, repeats allowed.
  ObjectSequence resample(std::span<const std::size_t> indices) const;
  ObjectSequence reversed() const;
  /// Every object multiplied by `factor` > 0, which multiplies all distances
  /// by the same factor (a change of units).
  ObjectSequence scaled(double factor) const;

 private:
  ObjectSequence(Space space, std::size_t shape, MatrixKind kind, std::vector<double> data);

  Space space_;
  std::size_t shape_;
  std::size_t p_;
  std::size_t n_;
  double weight_;
  MatrixKind kind_;
  std::vector<double> data_;
};

}  // namespace frechetcp
