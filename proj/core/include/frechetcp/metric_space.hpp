#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace frechetcp {

/// The object spaces shipped with the library. Each is flat in its stored
/// coordinates, so Fréchet means are weighted coordinate averages.
enum class Space { wasserstein, frobenius, euclidean };

std::string_view to_string(Space space);
Space parse_space(std::string_view name);

/// Structural flag carried by matrix objects; checked on construction.
enum class MatrixKind { general, laplacian, adjacency };

std::string_view to_string(MatrixKind kind);
MatrixKind parse_matrix_kind(std::string_view name);

/// A univariate distribution represented by its quantile function sampled at
/// the midpoints t_j = (j + 1/2) / M, j = 0..M-1.
class QuantileObject {
 public:
  /// Throws FormatError when values are non-finite, decreasing, or exceed
  /// `support_bound` in absolute value.
  explicit QuantileObject(std::vector<double> values,
                          std::optional<double> support_bound = std::nullopt);

  std::size_t grid_size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  /// Midpoint t_j of the uniform grid with `grid_size` cells (0-based j).
  static double grid_point(std::size_t j, std::size_t grid_size);

 private:
  std::vector<double> values_;
};

/// A symmetric r x r matrix stored dense and row-major.
class SymMatrixObject {
 public:
  /// Throws FormatError naming the offending (row, column), 1-based, when the
  /// matrix is asymmetric, non-finite, or violates the invariants of `kind`.
  SymMatrixObject(std::size_t dim, std::vector<double> entries,
                  MatrixKind kind = MatrixKind::general,
                  std::optional<double> entry_bound = std::nullopt);

  std::size_t dim() const { return dim_; }
  MatrixKind kind() const { return kind_; }
  std::span<const double> entries() const { return entries_; }
  double operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }

 private:
  std::size_t dim_;
  MatrixKind kind_;
  std::vector<double> entries_;
};

/// A point of R^d, optionally constrained to the box [-bound, bound]^d.
class EuclideanObject {
 public:
  explicit EuclideanObject(std::vector<double> coords,
                           std::optional<double> box_bound = std::nullopt);

  std::size_t dim() const { return coords_.size(); }
  std::span<const double> coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

/// Tagged value in one of the three spaces.
class MetricObject {
 public:
  using Value = std::variant<QuantileObject, SymMatrixObject, EuclideanObject>;

  MetricObject(QuantileObject object) : value_(std::move(object)) {}
  MetricObject(SymMatrixObject object) : value_(std::move(object)) {}
  MetricObject(EuclideanObject object) : value_(std::move(object)) {}

  Space space() const;
  /// Grid size M, matrix dimension r, or vector dimension d.
  std::size_t shape() const;
  MatrixKind matrix_kind() const;
  /// Stored coordinates: quantile values, row-major entries, or vector coordinates.
  std::span<const double> coords() const;

  const Value& value() const { return value_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&value_);
  }

 private:
  Value value_;
};

/// Builds an object of the given space from flat coordinates, validating the
/// space's invariants.
MetricObject make_object(Space space, std::size_t shape, std::vector<double> coords,
                         MatrixKind kind = MatrixKind::general);

/// Number of stored coordinates for an object of `space` with `shape`.
std::size_t coord_count(Space space, std::size_t shape);

/// Factor w such that d^2(a, b) = w * sum_j (a_j - b_j)^2 in stored
/// coordinates. The Wasserstein factor 1/M is the midpoint rule for the
/// integral over [0, 1].
double metric_weight(Space space, std::size_t shape);

double squared_distance(const MetricObject& a, const MetricObject& b);
double distance(const MetricObject& a, const MetricObject& b);

/// Minimizer of sum_i w_i d^2(items_i, omega), computed in closed form as the
/// weighted coordinate average. Weights must be nonnegative and sum to 1
/// within 1e-9.
MetricObject frechet_mean(std::span<const MetricObject> items, std::span<const double> weights);

/// sum_i w_i d^2(items_i, mean).
double frechet_variance(std::span<const MetricObject> items, std::span<const double> weights,
                        const MetricObject& mean);

/// L = D - A. Throws FormatError unless `adjacency` has a zero diagonal and
/// nonnegative off-diagonal entries.
SymMatrixObject laplacian_from_adjacency(const SymMatrixObject& adjacency);

}  // namespace frechetcp
