// frechetcp: change-point detection for sequences of random objects.
//
//   frechetcp detect   --input FILE --format FMT [calibration flags] [--segment]
//   frechetcp simulate --family NAME --param-grid a:b:step [calibration flags]
//   frechetcp generate --family NAME --param P --output FILE
//
// Exit codes: 0 success, 2 invalid usage or input, 3 degenerate data, 1 other failure.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "frechetcp/error.hpp"
#include "frechetcp/inference.hpp"
#include "frechetcp/io.hpp"
#include "frechetcp/report.hpp"
#include "frechetcp/segmentation.hpp"
#include "frechetcp/simulation.hpp"
#include "frechetcp/version.hpp"

namespace fs = std::filesystem;
using namespace frechetcp;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;
constexpr int exit_degenerate = 3;

struct CalibrationFlags {
  double c = 0.1;
  double alpha = 0.05;
  std::string method = "bootstrap";
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> m;
  std::uint64_t seed = 0;

  CalibrationConfig config() const {
    CalibrationConfig out;
    out.c = c;
    out.alpha = alpha;
    out.method = parse_calibration_method(method);
    out.num_replicates = replicates;
    out.bootstrap_m = m;
    out.seed = seed;
    return out;
  }
};

void add_calibration_flags(CLI::App* app, CalibrationFlags& flags) {
  app->add_option("--c", flags.c, "Trimming fraction: splits are scanned on [c, 1 - c]")
      ->capture_default_str();
  app->add_option("--alpha", flags.alpha, "Significance level")->capture_default_str();
  app->add_option("--method", flags.method, "Calibration of the critical value")
      ->check(CLI::IsMember({"bootstrap", "asymptotic"}))
      ->capture_default_str();
  app->add_option("--replicates", flags.replicates,
                  "Bootstrap resamples (default 1000) or bridge paths (default 100000)");
  app->add_option("--m", flags.m, "Bootstrap resample size (default: sequence length)");
  app->add_option("--seed", flags.seed, "Root random seed")->capture_default_str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) return parts;
    start = pos + 1;
  }
}

double parse_double(const std::string& text, std::string_view flag) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw PreconditionError(fmt::format("{}: '{}' is not a number", flag, text));
  return value;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

fs::path prepare_dir(const std::string& dir) {
  fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec)
    throw PreconditionError(
        fmt::format("--out-dir: cannot create '{}': {}", path.string(), ec.message()));
  return path;
}

struct DetectOptions {
  std::vector<std::string> inputs;
  std::string format;
  std::optional<std::string> space;
  std::optional<std::size_t> shape;
  std::optional<std::string> kind;
  bool to_laplacian = false;
  std::optional<std::string> support;
  bool segment = false;
  std::optional<std::size_t> min_len;
  bool bonferroni = false;
  std::string out_dir = ".";
  CalibrationFlags calibration;
};

int run_detect(const DetectOptions& opts) {
  DatasetManifest manifest;
  for (const auto& input : opts.inputs) manifest.paths.emplace_back(input);
  manifest.format = parse_data_format(opts.format);
  if (opts.space) manifest.space = parse_space(*opts.space);
  manifest.shape = opts.shape;
  if (opts.kind) manifest.kind = parse_matrix_kind(*opts.kind);
  manifest.to_laplacian = opts.to_laplacian;
  if (opts.support) {
    const auto parts = split(*opts.support, ':');
    if (parts.size() != 2) throw PreconditionError("--support: expected LOWER:UPPER");
    manifest.support =
        SupportInterval{parse_double(parts[0], "--support"), parse_double(parts[1], "--support")};
  }
  const CalibrationConfig config = opts.calibration.config();
  config.validate();

  const Dataset data = ingest(manifest);
  const RunContext context{opts.inputs, opts.format, data.labels};
  const fs::path out = prepare_dir(opts.out_dir);

  if (!opts.segment) {
    const ChangePointReport report = run_test(data.sequence, config);
    const std::string summary = test_summary(report, context);
    write_file(out / "report.json", test_report_json(report, context));
    write_file(out / "scan.csv", scan_csv(report.profile));
    write_file(out / "replicates.csv", replicates_csv(report.replicates));
    write_file(out / "summary.txt", summary);
    std::cout << summary;
    return exit_ok;
  }

  SegmentationOptions seg;
  seg.min_len = opts.min_len;
  seg.bonferroni = opts.bonferroni;
  const SegmentationResult result = binary_segmentation(data.sequence, config, seg);
  const SegmentNode& root = result.tree.front();
  if (root.outcome == NodeOutcome::degenerate)
    throw DegenerateVarianceError("the full sequence has degenerate Fréchet variance");
  if (root.outcome == NodeOutcome::too_short)
    throw PreconditionError(fmt::format("sequence of length {} is too short to test with c = {}",
                                        result.n, config.c));
  const std::string summary = segmentation_summary(result, config, context);
  write_file(out / "segmentation.json", segmentation_json(result, config, seg, context));
  write_file(out / "change_points.csv", change_points_csv(result));
  write_file(out / "report.json", test_report_json(*root.report, context));
  write_file(out / "scan.csv", scan_csv(root.report->profile));
  write_file(out / "summary.txt", summary);
  std::cout << summary;
  return exit_ok;
}

struct ScenarioOptions {
  std::string family;
  std::size_t n1 = 100;
  std::size_t n2 = 200;
  std::optional<std::size_t> shape;
};

void add_scenario_flags(CLI::App* app, ScenarioOptions& opts) {
  std::vector<std::string> names;
  for (Family f : all_families()) names.emplace_back(family_info(f).name);
  app->add_option("--family", opts.family, "Scenario family")
      ->required()
      ->check(CLI::IsMember(names));
  app->add_option("--n1", opts.n1, "Length of the first regime")->capture_default_str();
  app->add_option("--n2", opts.n2, "Length of the second regime")->capture_default_str();
  app->add_option("--shape", opts.shape,
                  "Quantile grid size, node count or dimension (default: family's)");
}

ScenarioSpec base_spec(const ScenarioOptions& opts, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.family = parse_family(opts.family);
  spec.n1 = opts.n1;
  spec.n2 = opts.n2;
  spec.shape = opts.shape;
  spec.seed = seed;
  spec.param = family_info(spec.family).null_param;
  return spec;
}

struct SimulateOptions {
  ScenarioOptions scenario;
  std::string param_grid;
  std::size_t runs = 100;
  std::string out_dir = ".";
  CalibrationFlags calibration;
};

int run_simulate(const SimulateOptions& opts) {
  const auto parts = split(opts.param_grid, ':');
  std::vector<double> grid;
  if (parts.size() == 1)
    grid = {parse_double(parts[0], "--param-grid")};
  else if (parts.size() == 3)
    grid = param_grid(parse_double(parts[0], "--param-grid"),
                      parse_double(parts[1], "--param-grid"),
                      parse_double(parts[2], "--param-grid"));
  else
    throw PreconditionError("--param-grid: expected START:STOP:STEP or a single value");
  if (opts.runs < 1) throw PreconditionError("--runs must be at least 1");

  const CalibrationConfig config = opts.calibration.config();
  config.validate();
  const ScenarioSpec base = base_spec(opts.scenario, opts.calibration.seed);
  const std::vector<ScenarioSpec> specs = scenario_grid(base, grid);
  const fs::path out = prepare_dir(opts.out_dir);

  const StudyResult result = run_study(specs, config, opts.runs);
  const std::string summary = study_summary(result);
  write_file(out / "study.json", study_json(result, base));
  write_file(out / "study.csv", study_csv(result));
  write_file(out / "summary.txt", summary);
  std::cout << summary;
  return exit_ok;
}

struct GenerateOptions {
  ScenarioOptions scenario;
  std::optional<double> param;
  std::uint64_t seed = 0;
  std::string output;
};

int run_generate(const GenerateOptions& opts) {
  ScenarioSpec spec = base_spec(opts.scenario, opts.seed);
  if (opts.param) spec.param = *opts.param;
  const ObjectSequence seq = gen_sequence(spec);
  const fs::path path(opts.output);
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  export_sequence(path, seq);
  std::cout << fmt::format("wrote {} {} objects ({}) to {}\n", seq.size(),
                           to_string(seq.space()), to_string(natural_format(seq.space())),
                           path.string());
  return exit_ok;
}

void print_usage_error(const CLI::App& app, const CLI::ParseError& e) {
  std::cerr << "frechetcp: " << e.what() << "\n\n";
  const auto subs = app.get_subcommands();
  std::cerr << (subs.empty() ? app.help() : subs.front()->help());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change-point detection for sequences of random objects in metric spaces",
               "frechetcp"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  DetectOptions detect;
  CLI::App* detect_cmd = app.add_subcommand("detect", "Test a data sequence for a change point");
  detect_cmd->add_option("--input", detect.inputs, "Input file(s), concatenated in order")
      ->required()
      ->check(CLI::ExistingFile);
  detect_cmd->add_option("--format", detect.format, "Input format")
      ->required()
      ->check(CLI::IsMember(
          {"quantile_csv", "histogram_csv", "samples_csv", "matrix_json", "vector_csv"}));
  detect_cmd->add_option("--space", detect.space, "Expected object space")
      ->check(CLI::IsMember({"wasserstein", "frobenius", "euclidean"}));
  detect_cmd->add_option("--shape", detect.shape,
                         "Quantile grid size for histogram/sample input; checked otherwise");
  detect_cmd->add_option("--kind", detect.kind, "Matrix kind to validate against")
      ->check(CLI::IsMember({"general", "laplacian", "adjacency"}));
  detect_cmd->add_flag("--to-laplacian", detect.to_laplacian,
                       "Convert adjacency matrices to graph Laplacians");
  detect_cmd->add_option("--support", detect.support,
                         "Clip quantile values into LOWER:UPPER (distribution formats)");
  detect_cmd->add_flag("--segment", detect.segment, "Run binary segmentation");
  detect_cmd->add_option("--min-len", detect.min_len,
                         "Shortest segment tested (default ceil(2/c) + 2)");
  detect_cmd->add_flag("--bonferroni", detect.bonferroni, "Test depth h at level alpha / 2^h");
  detect_cmd->add_option("--out-dir", detect.out_dir, "Output directory")->capture_default_str();
  add_calibration_flags(detect_cmd, detect.calibration);

  SimulateOptions simulate;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Estimate power and MAE over a parameter grid");
  add_scenario_flags(simulate_cmd, simulate.scenario);
  simulate_cmd->add_option("--param-grid", simulate.param_grid, "START:STOP:STEP or one value")
      ->required();
  simulate_cmd->add_option("--runs", simulate.runs, "Sequences per grid value")
      ->capture_default_str();
  simulate_cmd->add_option("--out-dir", simulate.out_dir, "Output directory")
      ->capture_default_str();
  add_calibration_flags(simulate_cmd, simulate.calibration);

  GenerateOptions generate;
  CLI::App* generate_cmd = app.add_subcommand("generate", "Write one synthetic sequence");
  add_scenario_flags(generate_cmd, generate.scenario);
  generate_cmd->add_option("--param", generate.param,
                           "Family parameter (default: the no-change value)");
  generate_cmd->add_option("--seed", generate.seed, "Random seed")->capture_default_str();
  generate_cmd->add_option("--output", generate.output, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_usage_error(app, e);
    return exit_usage;
  }

  try {
    if (detect_cmd->parsed()) return run_detect(detect);
    if (simulate_cmd->parsed()) return run_simulate(simulate);
    return run_generate(generate);
  } catch (const DegenerateVarianceError& e) {
    std::cerr << "frechetcp: degenerate data: " << e.what() << '\n';
    return exit_degenerate;
  } catch (const PreconditionError& e) {
    std::cerr << "frechetcp: " << e.what() << '\n';
    return exit_usage;
  } catch (const FormatError& e) {
    std::cerr << "frechetcp: invalid input: " << e.what() << '\n';
    return exit_usage;
  } catch (const DimensionError& e) {
    std::cerr << "frechetcp: invalid input: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "frechetcp: error: " << e.what() << '\n';
    return exit_failure;
  }
}
