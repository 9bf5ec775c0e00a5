#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frechetcp/metric_space.hpp"
#include "frechetcp/sequence.hpp"

namespace frechetcp {

/// On-disk layouts understood by ingest().
///
///  quantile_csv   header `label,q1,...,qM`; one quantile row per object.
///  histogram_csv  header `label,lower,upper,count`; one bin per row, rows
///                 grouped into objects by label in order of first appearance.
///  samples_csv    header `label,value`; one draw per row, grouped by label.
///  matrix_json    {"format": "matrix_json", "schema_version": 1, "dim": r,
///                  "kind": ..., "labels": [...], "matrices": [[row-major], ...]}
///  vector_csv     header `label,x1,...,xd`; one vector per row.
///
/// The `label` column of the CSV formats is optional.
enum class DataFormat { quantile_csv, histogram_csv, samples_csv, matrix_json, vector_csv };

std::string_view to_string(DataFormat format);
DataFormat parse_data_format(std::string_view name);
/// Space the objects of a format live in.
Space format_space(DataFormat format);

inline constexpr std::size_t default_quantile_grid = 100;

struct SupportInterval {
  double lower;
  double upper;
};

struct DatasetManifest {
  /// Files are read in order and their objects concatenated.
  std::vector<std::filesystem::path> paths;
  DataFormat format = DataFormat::quantile_csv;
  /// Must agree with the format when set.
  std::optional<Space> space;
  /// Quantile grid size for histogram and sample input (default 100); for the
  /// other formats a declared shape must match the parsed content.
  std::optional<std::size_t> shape;
  /// Replaces the labels found in the files; must have one entry per object.
  std::vector<std::string> labels;
  /// Clips quantile values into the interval (distribution formats only).
  std::optional<SupportInterval> support;
  /// Matrix kind to validate against; unset uses the kind stored in the file.
  std::optional<MatrixKind> kind;
  /// Converts adjacency matrices to graph Laplacians after validation.
  bool to_laplacian = false;
};

struct Dataset {
  ObjectSequence sequence;
  /// Empty, or one label per object.
  std::vector<std::string> labels;
};

/// Reads and validates every object. Throws FormatError naming the file, line
/// (or matrix) and column of the first offending entry, and
/// PreconditionError for an inconsistent manifest.
Dataset ingest(const DatasetManifest& manifest);

// Parsers over in-memory text; `source` only decorates error messages.
Dataset parse_table_csv(std::string_view text, DataFormat format, const DatasetManifest& manifest,
                        std::string_view source = "<input>");
Dataset parse_matrix_json(std::string_view text, const DatasetManifest& manifest,
                          std::string_view source = "<input>");

/// Quantile function of a histogram with uniform mass inside each bin,
/// evaluated on the midpoint grid of size M. Bins must not overlap.
QuantileObject histogram_quantiles(std::span<const double> lower, std::span<const double> upper,
                                   std::span<const double> counts, std::size_t grid_size);

/// Type-1 empirical quantiles x_(ceil(N t_j)) of raw draws.
QuantileObject sample_quantiles(std::vector<double> samples, std::size_t grid_size);

/// Exporters. Values are written with 17 significant digits, so ingesting the
/// output reproduces the sequence exactly. `labels` may be empty.
void write_table_csv(std::ostream& out, const ObjectSequence& seq,
                     std::span<const std::string> labels = {});
void write_matrix_json(std::ostream& out, const ObjectSequence& seq,
                       std::span<const std::string> labels = {});
/// Chooses the natural format of the sequence's space.
void export_sequence(const std::filesystem::path& path, const ObjectSequence& seq,
                     std::span<const std::string> labels = {});
DataFormat natural_format(Space space);

}  // namespace frechetcp
