#include "frechetcp/metric_space.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>
#include <string>

#include "frechetcp/error.hpp"

namespace frechetcp {
namespace {

void require_finite(std::span<const double> values, std::string_view what) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j]))
      throw FormatError(fmt::format("{}: non-finite value at position {}", what, j + 1));
  }
}

void require_bound(std::span<const double> values, std::optional<double> bound,
                   std::string_view what) {
  if (!bound) return;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (std::abs(values[j]) > *bound)
      throw FormatError(fmt::format("{}: value {} at position {} exceeds bound {}", what,
                                    values[j], j + 1, *bound));
  }
}

void require_same_shape(const MetricObject& a, const MetricObject& b) {
  if (a.space() != b.space())
    throw DimensionError(fmt::format("space mismatch: {} vs {}", to_string(a.space()),
                                     to_string(b.space())));
  if (a.shape() != b.shape())
    throw DimensionError(fmt::format("shape mismatch: {} vs {}", a.shape(), b.shape()));
}

void check_weights(std::size_t count, std::span<const double> weights) {
  if (count == 0) throw PreconditionError("frechet mean of an empty list");
  if (weights.size() != count)
    throw PreconditionError(
        fmt::format("{} weights given for {} objects", weights.size(), count));
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw PreconditionError(fmt::format("invalid weight {}", w));
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw PreconditionError(fmt::format("weights sum to {}, expected 1", total));
}

}  // namespace

std::string_view to_string(Space space) {
  switch (space) {
    case Space::wasserstein: return "wasserstein";
    case Space::frobenius: return "frobenius";
    case Space::euclidean: return "euclidean";
  }
  return "unknown";
}

Space parse_space(std::string_view name) {
  if (name == "wasserstein") return Space::wasserstein;
  if (name == "frobenius") return Space::frobenius;
  if (name == "euclidean") return Space::euclidean;
  throw PreconditionError(fmt::format("unknown space '{}'", name));
}

std::string_view to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::general: return "general";
    case MatrixKind::laplacian: return "laplacian";
    case MatrixKind::adjacency: return "adjacency";
  }
  return "unknown";
}

MatrixKind parse_matrix_kind(std::string_view name) {
  if (name == "general") return MatrixKind::general;
  if (name == "laplacian") return MatrixKind::laplacian;
  if (name == "adjacency") return MatrixKind::adjacency;
  throw PreconditionError(fmt::format("unknown matrix kind '{}'", name));
}

// ---------------------------------------------------------------------------

QuantileObject::QuantileObject(std::vector<double> values, std::optional<double> support_bound)
    : values_(std::move(values)) {
  if (values_.empty()) throw FormatError("quantile object: empty grid");
  require_finite(values_, "quantile object");
  for (std::size_t j = 1; j < values_.size(); ++j) {
    if (values_[j] < values_[j - 1])
      throw FormatError(fmt::format(
          "quantile object: values decrease between grid points {} and {} ({} > {})", j, j + 1,
          values_[j - 1], values_[j]));
  }
  require_bound(values_, support_bound, "quantile object");
}

double QuantileObject::grid_point(std::size_t j, std::size_t grid_size) {
  return (static_cast<double>(j) + 0.5) / static_cast<double>(grid_size);
}

SymMatrixObject::SymMatrixObject(std::size_t dim, std::vector<double> entries, MatrixKind kind,
                                 std::optional<double> entry_bound)
    : dim_(dim), kind_(kind), entries_(std::move(entries)) {
  if (dim_ == 0) throw FormatError("matrix object: dimension must be positive");
  if (entries_.size() != dim_ * dim_)
    throw FormatError(fmt::format("matrix object: expected {} entries for dimension {}, got {}",
                                  dim_ * dim_, dim_, entries_.size()));
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      const double v = entries_[i * dim_ + j];
      if (!std::isfinite(v))
        throw FormatError(fmt::format("matrix object: non-finite entry at ({},{})", i + 1, j + 1));
      if (j < i && v != entries_[j * dim_ + i])
        throw FormatError(fmt::format(
            "matrix object: asymmetric entry at ({},{}): {} != {} at ({},{})", i + 1, j + 1, v,
            entries_[j * dim_ + i], j + 1, i + 1));
    }
  }
  require_bound(entries_, entry_bound, "matrix object");

  if (kind_ == MatrixKind::adjacency) {
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        const double v = entries_[i * dim_ + j];
        if (i == j && v != 0.0)
          throw FormatError(
              fmt::format("adjacency matrix: nonzero diagonal entry at ({},{})", i + 1, j + 1));
        if (i != j && v < 0.0)
          throw FormatError(
              fmt::format("adjacency matrix: negative edge weight at ({},{})", i + 1, j + 1));
      }
    }
  } else if (kind_ == MatrixKind::laplacian) {
    for (std::size_t i = 0; i < dim_; ++i) {
      double row_sum = 0.0;
      double row_abs = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) {
        const double v = entries_[i * dim_ + j];
        if (i != j && v > 0.0)
          throw FormatError(
              fmt::format("laplacian matrix: positive off-diagonal entry at ({},{})", i + 1, j + 1));
        row_sum += v;
        row_abs += std::abs(v);
      }
      if (std::abs(row_sum) > 1e-9 * (1.0 + row_abs))
        throw FormatError(
            fmt::format("laplacian matrix: row {} sums to {}, expected 0", i + 1, row_sum));
    }
  }
}

EuclideanObject::EuclideanObject(std::vector<double> coords, std::optional<double> box_bound)
    : coords_(std::move(coords)) {
  if (coords_.empty()) throw FormatError("euclidean object: empty vector");
  require_finite(coords_, "euclidean object");
  require_bound(coords_, box_bound, "euclidean object");
}

// ---------------------------------------------------------------------------

Space MetricObject::space() const {
  return static_cast<Space>(value_.index());
}

std::size_t MetricObject::shape() const {
  return std::visit(
      [](const auto& object) -> std::size_t {
        using T = std::decay_t<decltype(object)>;
        if constexpr (std::is_same_v<T, QuantileObject>) return object.grid_size();
        else return object.dim();
      },
      value_);
}

MatrixKind MetricObject::matrix_kind() const {
  if (const auto* m = get_if<SymMatrixObject>()) return m->kind();
  return MatrixKind::general;
}

std::span<const double> MetricObject::coords() const {
  return std::visit(
      [](const auto& object) -> std::span<const double> {
        using T = std::decay_t<decltype(object)>;
        if constexpr (std::is_same_v<T, QuantileObject>) return object.values();
        else if constexpr (std::is_same_v<T, SymMatrixObject>) return object.entries();
        else return object.coords();
      },
      value_);
}

MetricObject make_object(Space space, std::size_t shape, std::vector<double> coords,
                         MatrixKind kind) {
  if (coords.size() != coord_count(space, shape))
    throw DimensionError(fmt::format("{} object of shape {} needs {} coordinates, got {}",
                                     to_string(space), shape, coord_count(space, shape),
                                     coords.size()));
  switch (space) {
    case Space::wasserstein: return QuantileObject(std::move(coords));
    case Space::frobenius: return SymMatrixObject(shape, std::move(coords), kind);
    case Space::euclidean: return EuclideanObject(std::move(coords));
  }
  throw PreconditionError("unknown space");
}

std::size_t coord_count(Space space, std::size_t shape) {
  return space == Space::frobenius ? shape * shape : shape;
}

double metric_weight(Space space, std::size_t shape) {
  return space == Space::wasserstein ? 1.0 / static_cast<double>(shape) : 1.0;
}

double squared_distance(const MetricObject& a, const MetricObject& b) {
  require_same_shape(a, b);
  const auto x = a.coords();
  const auto y = b.coords();
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - y[j];
    sum += diff * diff;
  }
  return metric_weight(a.space(), a.shape()) * sum;
}

double distance(const MetricObject& a, const MetricObject& b) {
  return std::sqrt(squared_distance(a, b));
}

MetricObject frechet_mean(std::span<const MetricObject> items, std::span<const double> weights) {
  check_weights(items.size(), weights);
  const MetricObject& first = items.front();
  MatrixKind kind = first.matrix_kind();
  for (const auto& item : items) {
    require_same_shape(first, item);
    if (item.matrix_kind() != kind) kind = MatrixKind::general;
  }
  std::vector<double> mean(first.coords().size(), 0.0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const auto x = items[i].coords();
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += weights[i] * x[j];
  }
  return make_object(first.space(), first.shape(), std::move(mean), kind);
}

double frechet_variance(std::span<const MetricObject> items, std::span<const double> weights,
                        const MetricObject& mean) {
  check_weights(items.size(), weights);
  double sum = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i)
    sum += weights[i] * squared_distance(items[i], mean);
  return sum;
}

SymMatrixObject laplacian_from_adjacency(const SymMatrixObject& adjacency) {
  const std::size_t r = adjacency.dim();
  // Re-validate as adjacency regardless of the flag it was built with.
  const SymMatrixObject checked(r, std::vector<double>(adjacency.entries().begin(),
                                                       adjacency.entries().end()),
                                MatrixKind::adjacency);
  std::vector<double> laplacian(r * r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      if (i == j) continue;
      degree += checked(i, j);
      laplacian[i * r + j] = 0.0 - checked(i, j);
    }
    laplacian[i * r + i] = degree;
  }
  return SymMatrixObject(r, std::move(laplacian), MatrixKind::laplacian);
}

}  // namespace frechetcp
