#include "frechetcp/sequence.hpp"

#include <fmt/format.h>

#include <cmath>

#include "frechetcp/error.hpp"

namespace frechetcp {

ObjectSequence::ObjectSequence(std::span<const MetricObject> items) {
  if (items.size() < 2)
    throw PreconditionError(
        fmt::format("a sequence needs at least 2 objects, got {}", items.size()));
  const MetricObject& first = items.front();
  space_ = first.space();
  shape_ = first.shape();
  p_ = coord_count(space_, shape_);
  n_ = items.size();
  weight_ = frechetcp::metric_weight(space_, shape_);
  kind_ = first.matrix_kind();
  data_.reserve(n_ * p_);
  for (std::size_t i = 0; i < n_; ++i) {
    const MetricObject& item = items[i];
    if (item.space() != space_ || item.shape() != shape_)
      throw DimensionError(fmt::format(
          "sequence item {} is a {} object of shape {}, expected {} of shape {}", i + 1,
          to_string(item.space()), item.shape(), to_string(space_), shape_));
    if (item.matrix_kind() != kind_) kind_ = MatrixKind::general;
    const auto c = item.coords();
    data_.insert(data_.end(), c.begin(), c.end());
  }
}

ObjectSequence::ObjectSequence(Space space, std::size_t shape, MatrixKind kind,
                               std::vector<double> data)
    : space_(space),
      shape_(shape),
      p_(coord_count(space, shape)),
      n_(data.size() / coord_count(space, shape)),
      weight_(frechetcp::metric_weight(space, shape)),
      kind_(kind),
      data_(std::move(data)) {
  if (n_ < 2)
    throw PreconditionError(fmt::format("a sequence needs at least 2 objects, got {}", n_));
}

MetricObject ObjectSequence::item(std::size_t i) const {
  const auto c = coords(i);
  return make_object(space_, shape_, std::vector<double>(c.begin(), c.end()), kind_);
}

std::vector<MetricObject> ObjectSequence::items() const {
  std::vector<MetricObject> out;
  out.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) out.push_back(item(i));
  return out;
}

ObjectSequence ObjectSequence::subsequence(std::size_t begin, std::size_t end) const {
  if (begin > end || end > n_)
    throw PreconditionError(
        fmt::format("subsequence [{}, {}) out of range for length {}", begin, end, n_));
  return ObjectSequence(space_, shape_, kind_,
                        std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(begin * p_),
                                            data_.begin() + static_cast<std::ptrdiff_t>(end * p_)));
}

ObjectSequence ObjectSequence::resample(std::span<const std::size_t> indices) const {
  std::vector<double> data;
  data.reserve(indices.size() * p_);
  for (std::size_t idx : indices) {
    if (idx >= n_) throw PreconditionError(fmt::format("resample index {} out of range", idx));
    const auto c = coords(idx);
    data.insert(data.end(), c.begin(), c.end());
  }
  return ObjectSequence(space_, shape_, kind_, std::move(data));
}

ObjectSequence ObjectSequence::reversed() const {
  std::vector<double> data;
  data.reserve(data_.size());
  for (std::size_t i = n_; i-- > 0;) {
    const auto c = coords(i);
    data.insert(data.end(), c.begin(), c.end());
  }
  return ObjectSequence(space_, shape_, kind_, std::move(data));
}

ObjectSequence ObjectSequence::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw PreconditionError(fmt::format("scale factor must be positive, got {}", factor));
  std::vector<double> data(data_);
  for (double& v : data) v *= factor;
  return ObjectSequence(space_, shape_, kind_, std::move(data));
}

}  // namespace frechetcp
