#include "frechetcp/io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "frechetcp/error.hpp"

namespace frechetcp {
namespace {

using nlohmann::json;

struct Parsed {
  std::vector<MetricObject> items;
  std::vector<std::string> labels;
  bool labelled = false;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Row {
  std::size_t line;
  std::vector<std::string_view> fields;
};

// Non-blank lines split on commas. Quoting is not supported.
std::vector<Row> split_rows(std::string_view text) {
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (trim(line).empty()) continue;
    Row row{line_no, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_number(std::string_view field, std::string_view source, std::size_t line,
                    std::size_t column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last)
    throw FormatError(fmt::format("{}: line {}, column {}: '{}' is not a number", source, line,
                                  column, field));
  if (!std::isfinite(value))
    throw FormatError(
        fmt::format("{}: line {}, column {}: non-finite value", source, line, column));
  return value;
}

void require_space(const DatasetManifest& manifest, DataFormat format) {
  if (manifest.space && *manifest.space != format_space(format))
    throw PreconditionError(fmt::format("format {} holds {} objects, not {}", to_string(format),
                                        to_string(format_space(format)),
                                        to_string(*manifest.space)));
}

std::size_t grid_size_of(const DatasetManifest& manifest) {
  const std::size_t m = manifest.shape.value_or(default_quantile_grid);
  if (m == 0) throw PreconditionError("quantile grid size must be positive");
  return m;
}

QuantileObject clip(QuantileObject object, const DatasetManifest& manifest) {
  if (!manifest.support) return object;
  const auto [lo, hi] = *manifest.support;
  std::vector<double> values(object.values().begin(), object.values().end());
  for (double& v : values) v = std::clamp(v, lo, hi);
  return QuantileObject(std::move(values));
}

void check_support(const DatasetManifest& manifest) {
  if (!manifest.support) return;
  const auto [lo, hi] = *manifest.support;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    throw PreconditionError(fmt::format("invalid support interval [{}, {}]", lo, hi));
  if (format_space(manifest.format) != Space::wasserstein)
    throw PreconditionError("a support interval applies to distribution formats only");
}

// Column positions of named fields in a long-format header.
std::size_t find_column(const Row& header, std::string_view name, std::string_view source) {
  const auto it = std::find(header.fields.begin(), header.fields.end(), name);
  if (it == header.fields.end())
    throw FormatError(fmt::format("{}: line {}: header lacks a '{}' column", source, header.line,
                                  name));
  return static_cast<std::size_t>(it - header.fields.begin());
}

void check_width(const Row& row, const Row& header, std::string_view source) {
  if (row.fields.size() != header.fields.size())
    throw FormatError(fmt::format("{}: line {}: expected {} fields, found {}", source, row.line,
                                  header.fields.size(), row.fields.size()));
}

Parsed parse_wide(const std::vector<Row>& rows, DataFormat format, const DatasetManifest& manifest,
                  std::string_view source) {
  const Row& header = rows.front();
  const bool labelled = header.fields.front() == "label";
  const std::size_t offset = labelled ? 1 : 0;
  const std::size_t width = header.fields.size() - offset;
  if (width == 0)
    throw FormatError(fmt::format("{}: line {}: header has no value columns", source, header.line));
  if (manifest.shape && *manifest.shape != width)
    throw FormatError(fmt::format("{}: declared shape {} but the header has {} value columns",
                                  source, *manifest.shape, width));

  Parsed out;
  out.labelled = labelled;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row& row = rows[r];
    check_width(row, header, source);
    std::vector<double> values(width);
    for (std::size_t j = 0; j < width; ++j)
      values[j] = parse_number(row.fields[offset + j], source, row.line, offset + j + 1);
    if (labelled) out.labels.emplace_back(row.fields.front());
    try {
      if (format == DataFormat::quantile_csv)
        out.items.emplace_back(clip(QuantileObject(std::move(values)), manifest));
      else
        out.items.emplace_back(EuclideanObject(std::move(values)));
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("{}: line {}: {}", source, row.line, e.what()));
    }
  }
  return out;
}

// Groups long-format rows by label, keeping the order of first appearance.
template <class Accumulate>
Parsed parse_long(const std::vector<Row>& rows, std::string_view source,
                  std::vector<std::string_view> value_columns, Accumulate&& build) {
  const Row& header = rows.front();
  const bool labelled =
      std::find(header.fields.begin(), header.fields.end(), "label") != header.fields.end();
  const std::size_t label_col = labelled ? find_column(header, "label", source) : 0;
  std::vector<std::size_t> cols;
  for (auto name : value_columns) cols.push_back(find_column(header, name, source));

  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> group_of;
  std::vector<std::vector<std::vector<double>>> groups;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row& row = rows[r];
    check_width(row, header, source);
    const std::string key = labelled ? std::string(row.fields[label_col]) : std::string();
    auto [it, inserted] = group_of.try_emplace(key, order.size());
    if (inserted) {
      order.push_back(key);
      groups.emplace_back(cols.size());
    }
    for (std::size_t c = 0; c < cols.size(); ++c)
      groups[it->second][c].push_back(parse_number(row.fields[cols[c]], source, row.line,
                                                   cols[c] + 1));
  }

  Parsed out;
  out.labelled = labelled;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    try {
      out.items.emplace_back(build(groups[g]));
    } catch (const FormatError& e) {
      throw FormatError(labelled ? fmt::format("{}: object '{}': {}", source, order[g], e.what())
                                 : fmt::format("{}: {}", source, e.what()));
    }
    if (labelled) out.labels.push_back(order[g]);
  }
  return out;
}

Parsed parse_table(std::string_view text, DataFormat format, const DatasetManifest& manifest,
                   std::string_view source) {
  const std::vector<Row> rows = split_rows(text);
  if (rows.empty()) throw FormatError(fmt::format("{}: file is empty", source));
  switch (format) {
    case DataFormat::quantile_csv:
    case DataFormat::vector_csv:
      return parse_wide(rows, format, manifest, source);
    case DataFormat::histogram_csv: {
      const std::size_t m = grid_size_of(manifest);
      return parse_long(rows, source, {"lower", "upper", "count"}, [&](const auto& cols) {
        return clip(histogram_quantiles(cols[0], cols[1], cols[2], m), manifest);
      });
    }
    case DataFormat::samples_csv: {
      const std::size_t m = grid_size_of(manifest);
      return parse_long(rows, source, {"value"}, [&](const auto& cols) {
        return clip(sample_quantiles(cols[0], m), manifest);
      });
    }
    case DataFormat::matrix_json:
      break;
  }
  throw PreconditionError("matrix_json is not a CSV format");
}

double json_number(const json& value, std::string_view source, std::size_t m, std::size_t i,
                   std::size_t j) {
  if (!value.is_number())
    throw FormatError(fmt::format("{}: matrix {}: entry ({},{}) is not a number", source, m + 1,
                                  i + 1, j + 1));
  return value.get<double>();
}

Parsed parse_matrices(std::string_view text, const DatasetManifest& manifest,
                      std::string_view source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(fmt::format("{}: invalid JSON: {}", source, e.what()));
  }
  if (!doc.is_object()) throw FormatError(fmt::format("{}: expected a JSON object", source));
  if (doc.contains("format") && doc["format"] != "matrix_json")
    throw FormatError(fmt::format("{}: format field is {}, expected \"matrix_json\"", source,
                                  doc["format"].dump()));
  if (doc.contains("schema_version") && doc["schema_version"] != 1)
    throw FormatError(fmt::format("{}: unsupported schema_version {}", source,
                                  doc["schema_version"].dump()));
  if (!doc.contains("dim") || !doc["dim"].is_number_unsigned() || doc["dim"].get<std::size_t>() == 0)
    throw FormatError(fmt::format("{}: 'dim' must be a positive integer", source));
  const auto dim = doc["dim"].get<std::size_t>();
  if (manifest.shape && *manifest.shape != dim)
    throw FormatError(
        fmt::format("{}: declared shape {} but the file has dim {}", source, *manifest.shape, dim));

  MatrixKind kind = MatrixKind::general;
  if (doc.contains("kind")) {
    if (!doc["kind"].is_string()) throw FormatError(fmt::format("{}: 'kind' must be a string", source));
    try {
      kind = parse_matrix_kind(doc["kind"].get<std::string>());
    } catch (const PreconditionError& e) {
      throw FormatError(fmt::format("{}: {}", source, e.what()));
    }
  }
  if (manifest.kind) kind = *manifest.kind;
  if (manifest.to_laplacian && kind != MatrixKind::adjacency)
    throw PreconditionError("conversion to Laplacians needs adjacency matrices (kind adjacency)");

  if (!doc.contains("matrices") || !doc["matrices"].is_array())
    throw FormatError(fmt::format("{}: 'matrices' must be an array", source));
  const json& matrices = doc["matrices"];

  Parsed out;
  if (doc.contains("labels")) {
    const json& labels = doc["labels"];
    if (!labels.is_array() || labels.size() != matrices.size())
      throw FormatError(fmt::format("{}: 'labels' must be an array with one entry per matrix",
                                    source));
    for (const auto& label : labels)
      out.labels.push_back(label.is_string() ? label.get<std::string>() : label.dump());
    out.labelled = true;
  }

  for (std::size_t m = 0; m < matrices.size(); ++m) {
    const json& mat = matrices[m];
    std::vector<double> entries;
    entries.reserve(dim * dim);
    const bool nested = mat.is_array() && !mat.empty() && mat.front().is_array();
    if (!mat.is_array() || (nested ? mat.size() != dim : mat.size() != dim * dim))
      throw FormatError(fmt::format("{}: matrix {}: expected {} rows of {} entries", source, m + 1,
                                    dim, dim));
    for (std::size_t i = 0; i < dim; ++i) {
      if (nested && (!mat[i].is_array() || mat[i].size() != dim))
        throw FormatError(
            fmt::format("{}: matrix {}: row {} must hold {} entries", source, m + 1, i + 1, dim));
      for (std::size_t j = 0; j < dim; ++j)
        entries.push_back(
            json_number(nested ? mat[i][j] : mat[i * dim + j], source, m, i, j));
    }
    try {
      SymMatrixObject object(dim, std::move(entries), kind);
      if (manifest.to_laplacian) object = laplacian_from_adjacency(object);
      out.items.emplace_back(std::move(object));
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("{}: matrix {}: {}", source, m + 1, e.what()));
    }
  }
  return out;
}

Dataset assemble(std::vector<Parsed> parts, const DatasetManifest& manifest) {
  std::vector<MetricObject> items;
  std::vector<std::string> labels;
  const bool all_labelled =
      std::all_of(parts.begin(), parts.end(), [](const Parsed& p) { return p.labelled; });
  for (auto& part : parts) {
    std::move(part.items.begin(), part.items.end(), std::back_inserter(items));
    if (all_labelled) std::move(part.labels.begin(), part.labels.end(), std::back_inserter(labels));
  }
  if (!manifest.labels.empty()) {
    if (manifest.labels.size() != items.size())
      throw PreconditionError(fmt::format("{} labels given for {} objects", manifest.labels.size(),
                                          items.size()));
    labels = manifest.labels;
  }
  return Dataset{ObjectSequence(items), std::move(labels)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError(fmt::format("cannot open input file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string number(double value) { return fmt::format("{:.17g}", value); }

void check_labels(const ObjectSequence& seq, std::span<const std::string> labels) {
  if (!labels.empty() && labels.size() != seq.size())
    throw PreconditionError(
        fmt::format("{} labels given for {} objects", labels.size(), seq.size()));
}

}  // namespace

std::string_view to_string(DataFormat format) {
  switch (format) {
    case DataFormat::quantile_csv: return "quantile_csv";
    case DataFormat::histogram_csv: return "histogram_csv";
    case DataFormat::samples_csv: return "samples_csv";
    case DataFormat::matrix_json: return "matrix_json";
    case DataFormat::vector_csv: return "vector_csv";
  }
  return "unknown";
}

DataFormat parse_data_format(std::string_view name) {
  for (auto f : {DataFormat::quantile_csv, DataFormat::histogram_csv, DataFormat::samples_csv,
                 DataFormat::matrix_json, DataFormat::vector_csv})
    if (to_string(f) == name) return f;
  throw PreconditionError(fmt::format("unknown data format '{}'", name));
}

Space format_space(DataFormat format) {
  switch (format) {
    case DataFormat::matrix_json: return Space::frobenius;
    case DataFormat::vector_csv: return Space::euclidean;
    default: return Space::wasserstein;
  }
}

DataFormat natural_format(Space space) {
  switch (space) {
    case Space::wasserstein: return DataFormat::quantile_csv;
    case Space::frobenius: return DataFormat::matrix_json;
    case Space::euclidean: return DataFormat::vector_csv;
  }
  return DataFormat::quantile_csv;
}

QuantileObject histogram_quantiles(std::span<const double> lower, std::span<const double> upper,
                                   std::span<const double> counts, std::size_t grid_size) {
  const std::size_t bins = counts.size();
  if (bins == 0 || lower.size() != bins || upper.size() != bins)
    throw FormatError("histogram: needs matching, non-empty lower, upper and count columns");
  if (grid_size == 0) throw PreconditionError("quantile grid size must be positive");
  std::vector<std::size_t> order(bins);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lower[a] < lower[b]; });
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (!(std::isfinite(lower[b]) && std::isfinite(upper[b]) && lower[b] < upper[b]))
      throw FormatError(fmt::format("histogram: bin {} has invalid edges [{}, {}]", b + 1,
                                    lower[b], upper[b]));
    if (!(std::isfinite(counts[b]) && counts[b] >= 0.0))
      throw FormatError(fmt::format("histogram: bin {} has invalid count {}", b + 1, counts[b]));
    total += counts[b];
  }
  for (std::size_t i = 1; i < bins; ++i)
    if (lower[order[i]] < upper[order[i - 1]])
      throw FormatError(fmt::format("histogram: bins {} and {} overlap", order[i - 1] + 1,
                                    order[i] + 1));
  if (!(total > 0.0)) throw FormatError("histogram: total count must be positive");

  std::vector<double> values(grid_size);
  std::size_t i = 0;
  double mass_before = 0.0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double t = QuantileObject::grid_point(j, grid_size);
    // Advance to the first bin whose cumulative mass reaches t.
    while (i + 1 < bins && mass_before + counts[order[i]] / total < t) {
      mass_before += counts[order[i]] / total;
      ++i;
    }
    const std::size_t b = order[i];
    const double share = counts[b] / total;
    const double frac = share > 0.0 ? std::clamp((t - mass_before) / share, 0.0, 1.0) : 1.0;
    values[j] = std::clamp(lower[b] + frac * (upper[b] - lower[b]), lower[b], upper[b]);
  }
  return QuantileObject(std::move(values));
}

QuantileObject sample_quantiles(std::vector<double> samples, std::size_t grid_size) {
  if (samples.empty()) throw FormatError("samples: no draws");
  if (grid_size == 0) throw PreconditionError("quantile grid size must be positive");
  for (double x : samples)
    if (!std::isfinite(x)) throw FormatError("samples: non-finite draw");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  std::vector<double> values(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j) {
    // ceil(n (2j + 1) / (2M)) in integer arithmetic.
    const std::size_t rank = (n * (2 * j + 1) + 2 * grid_size - 1) / (2 * grid_size);
    values[j] = samples[std::clamp<std::size_t>(rank, 1, n) - 1];
  }
  return QuantileObject(std::move(values));
}

Dataset parse_table_csv(std::string_view text, DataFormat format, const DatasetManifest& manifest,
                        std::string_view source) {
  require_space(manifest, format);
  check_support(manifest);
  std::vector<Parsed> parts;
  parts.push_back(parse_table(text, format, manifest, source));
  return assemble(std::move(parts), manifest);
}

Dataset parse_matrix_json(std::string_view text, const DatasetManifest& manifest,
                          std::string_view source) {
  require_space(manifest, DataFormat::matrix_json);
  std::vector<Parsed> parts;
  parts.push_back(parse_matrices(text, manifest, source));
  return assemble(std::move(parts), manifest);
}

Dataset ingest(const DatasetManifest& manifest) {
  if (manifest.paths.empty()) throw PreconditionError("no input files given");
  require_space(manifest, manifest.format);
  check_support(manifest);
  std::vector<Parsed> parts;
  for (const auto& path : manifest.paths) {
    const std::string text = read_file(path);
    const std::string source = path.string();
    parts.push_back(manifest.format == DataFormat::matrix_json
                        ? parse_matrices(text, manifest, source)
                        : parse_table(text, manifest.format, manifest, source));
  }
  return assemble(std::move(parts), manifest);
}

void write_table_csv(std::ostream& out, const ObjectSequence& seq,
                     std::span<const std::string> labels) {
  if (seq.space() == Space::frobenius)
    throw PreconditionError("matrix sequences are exported as matrix_json");
  check_labels(seq, labels);
  const char prefix = seq.space() == Space::wasserstein ? 'q' : 'x';
  const bool labelled = !labels.empty();
  std::string line = labelled ? "label" : "";
  for (std::size_t j = 0; j < seq.coord_dim(); ++j) {
    if (labelled || j > 0) line += ',';
    line += fmt::format("{}{}", prefix, j + 1);
  }
  out << line << '\n';
  for (std::size_t i = 0; i < seq.size(); ++i) {
    line = labelled ? labels[i] : "";
    const auto y = seq.coords(i);
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (labelled || j > 0) line += ',';
      line += number(y[j]);
    }
    out << line << '\n';
  }
}

void write_matrix_json(std::ostream& out, const ObjectSequence& seq,
                       std::span<const std::string> labels) {
  if (seq.space() != Space::frobenius)
    throw PreconditionError("only matrix sequences are exported as matrix_json");
  check_labels(seq, labels);
  out << "{\n  \"format\": \"matrix_json\",\n  \"schema_version\": 1,\n";
  out << "  \"dim\": " << seq.shape() << ",\n";
  out << "  \"kind\": " << json(std::string(to_string(seq.matrix_kind()))).dump() << ",\n";
  if (!labels.empty()) {
    out << "  \"labels\": [";
    for (std::size_t i = 0; i < labels.size(); ++i)
      out << (i ? ", " : "") << json(labels[i]).dump();
    out << "],\n";
  }
  out << "  \"matrices\": [\n";
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out << "    [";
    const auto y = seq.coords(i);
    for (std::size_t j = 0; j < y.size(); ++j) out << (j ? ", " : "") << number(y[j]);
    out << (i + 1 < seq.size() ? "],\n" : "]\n");
  }
  out << "  ]\n}\n";
}

void export_sequence(const std::filesystem::path& path, const ObjectSequence& seq,
                     std::span<const std::string> labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError(fmt::format("cannot write '{}'", path.string()));
  if (seq.space() == Space::frobenius)
    write_matrix_json(out, seq, labels);
  else
    write_table_csv(out, seq, labels);
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace frechetcp
