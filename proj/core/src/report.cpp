#include "frechetcp/report.hpp"

#include <fmt/format.h>

#include <nlohmann/json.hpp>

#include "frechetcp/error.hpp"
#include "frechetcp/version.hpp"

namespace frechetcp {
namespace {

using nlohmann::ordered_json;

std::string num(double value) { return fmt::format("{:.17g}", value); }

ordered_json config_json(const CalibrationConfig& config) {
  ordered_json j;
  j["c"] = config.c;
  j["alpha"] = config.alpha;
  j["method"] = to_string(config.method);
  j["replicates"] = config.replicates();
  j["bootstrap_m"] = config.bootstrap_m ? ordered_json(*config.bootstrap_m) : ordered_json();
  j["seed"] = config.seed;
  return j;
}

ordered_json header(std::string_view kind) {
  ordered_json j;
  j["schema_version"] = report_schema_version;
  j["generator"] = "frechetcp";
  j["version"] = version;
  j["kind"] = kind;
  return j;
}

ordered_json context_json(const RunContext& context) {
  ordered_json j;
  j["inputs"] = context.inputs;
  j["format"] = context.format;
  j["labelled"] = !context.labels.empty();
  return j;
}

ordered_json label_or_null(std::size_t one_based, std::span<const std::string> labels) {
  if (labels.empty() || one_based == 0 || one_based > labels.size()) return nullptr;
  return labels[one_based - 1];
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string calibration_line(const CalibrationConfig& config) {
  std::string line = fmt::format("calibration: {}, {} replicates", to_string(config.method),
                                 config.replicates());
  if (config.method == CalibrationMethod::bootstrap && config.bootstrap_m)
    line += fmt::format(" of size {}", *config.bootstrap_m);
  return line + fmt::format(", c = {}, alpha = {}, seed {}\n", config.c, config.alpha, config.seed);
}

}  // namespace

std::string describe_change_point(std::size_t k, std::span<const std::string> labels) {
  if (labels.empty() || k == 0 || k >= labels.size())
    return fmt::format("after object {}", k);
  return fmt::format("after object {} ({}), before object {} ({})", k, labels[k - 1], k + 1,
                     labels[k]);
}

std::string test_report_json(const ChangePointReport& report, const RunContext& context) {
  const ScanProfile& profile = report.profile;
  ordered_json j = header("change_point_test");
  j["input"] = context_json(context);
  ordered_json data;
  data["n"] = profile.n;
  data["space"] = to_string(profile.pooled_mean.space());
  data["shape"] = profile.pooled_mean.shape();
  j["data"] = data;
  j["config"] = config_json(report.config);
  ordered_json result;
  result["statistic"] = report.stat;
  result["critical_value"] = report.critical_value;
  result["p_value"] = report.p_value;
  result["reject"] = report.reject;
  result["tau_hat"] = report.tau_hat;
  result["tau_hat_index"] = report.tau_hat_index;
  result["label_before"] = label_or_null(report.tau_hat_index, context.labels);
  result["label_after"] = label_or_null(report.tau_hat_index + 1, context.labels);
  result["pooled_variance"] = profile.pooled_var;
  result["sigma_sq"] = profile.sigma_sq;
  result["replicates_used"] = report.replicates_used;
  result["degenerate_replicates"] = report.degenerate_replicates;
  j["result"] = result;
  return dump(j);
}

std::string scan_csv(const ScanProfile& profile) {
  std::string out = "k,u,T_n,v_left,v_right,v_left_cont,v_right_cont\n";
  for (const auto& p : profile.points)
    out += fmt::format("{},{},{},{},{},{},{}\n", p.k, num(p.u), num(p.t_value), num(p.v_left),
                       num(p.v_right), num(p.v_left_cont), num(p.v_right_cont));
  return out;
}

std::string replicates_csv(std::span<const double> replicates) {
  std::string out = "replicate,value\n";
  for (std::size_t r = 0; r < replicates.size(); ++r)
    out += fmt::format("{},{}\n", r, num(replicates[r]));
  return out;
}

std::string test_summary(const ChangePointReport& report, const RunContext& context) {
  const ScanProfile& profile = report.profile;
  std::string out = fmt::format("frechetcp {} change-point test\n", version);
  out += fmt::format("objects: {} ({} space, shape {})\n", profile.n,
                     to_string(profile.pooled_mean.space()), profile.pooled_mean.shape());
  out += calibration_line(report.config);
  out += fmt::format("statistic: {:.6g} (critical value {:.6g}, p-value {:.6g})\n", report.stat,
                     report.critical_value, report.p_value);
  out += fmt::format("decision: {}\n", report.reject ? "reject the no-change hypothesis"
                                                     : "no significant change");
  out += fmt::format("estimated change point: tau_hat = {:.6g}, {}\n", report.tau_hat,
                     describe_change_point(report.tau_hat_index, context.labels));
  return out;
}

std::string segmentation_json(const SegmentationResult& result, const CalibrationConfig& config,
                              const SegmentationOptions& options, const RunContext& context) {
  ordered_json j = header("binary_segmentation");
  j["input"] = context_json(context);
  j["n"] = result.n;
  j["config"] = config_json(config);
  j["min_segment_length"] = options.min_len.value_or(default_min_segment_length(config.c));
  j["bonferroni"] = options.bonferroni;

  ordered_json points = ordered_json::array();
  for (const auto& cp : result.change_points) {
    ordered_json p;
    p["index"] = cp.index;
    p["u"] = static_cast<double>(cp.index) / static_cast<double>(result.n);
    p["tau_local"] = cp.tau_local;
    p["p_value"] = cp.p_value;
    p["depth"] = cp.depth;
    p["label_before"] = label_or_null(cp.index, context.labels);
    p["label_after"] = label_or_null(cp.index + 1, context.labels);
    points.push_back(p);
  }
  j["change_points"] = points;

  ordered_json tree = ordered_json::array();
  for (const auto& node : result.tree) {
    ordered_json t;
    t["begin"] = node.begin;
    t["end"] = node.end;
    t["depth"] = node.depth;
    t["outcome"] = to_string(node.outcome);
    t["alpha"] = node.alpha;
    if (node.report) {
      t["statistic"] = node.report->stat;
      t["critical_value"] = node.report->critical_value;
      t["p_value"] = node.report->p_value;
      t["reject"] = node.report->reject;
      t["tau_hat_index"] = node.report->tau_hat_index;
    }
    t["left"] = node.left_child ? ordered_json(*node.left_child) : ordered_json();
    t["right"] = node.right_child ? ordered_json(*node.right_child) : ordered_json();
    tree.push_back(t);
  }
  j["tree"] = tree;
  return dump(j);
}

std::string change_points_csv(const SegmentationResult& result) {
  std::string out = "index,u,p_value,depth\n";
  for (const auto& cp : result.change_points)
    out += fmt::format("{},{},{},{}\n", cp.index,
                       num(static_cast<double>(cp.index) / static_cast<double>(result.n)),
                       num(cp.p_value), cp.depth);
  return out;
}

std::string segmentation_summary(const SegmentationResult& result, const CalibrationConfig& config,
                                 const RunContext& context) {
  std::string out = fmt::format("frechetcp {} binary segmentation\n", version);
  out += fmt::format("objects: {}, nodes tested or skipped: {}\n", result.n, result.tree.size());
  out += calibration_line(config);
  if (result.change_points.empty()) {
    out += "change points: none\n";
    return out;
  }
  out += fmt::format("change points: {}\n", result.change_points.size());
  for (const auto& cp : result.change_points)
    out += fmt::format("  {} (p-value {:.6g}, depth {})\n",
                       describe_change_point(cp.index, context.labels), cp.p_value, cp.depth);
  return out;
}

std::string study_json(const StudyResult& result, const ScenarioSpec& base) {
  const FamilyInfo& info = family_info(result.family);
  ordered_json j = header("simulation_study");
  ordered_json scenario;
  scenario["family"] = info.name;
  scenario["space"] = to_string(info.space);
  scenario["shape"] = base.resolved_shape();
  scenario["n1"] = result.n1;
  scenario["n2"] = result.n2;
  scenario["tau"] = static_cast<double>(result.n1) / static_cast<double>(result.n1 + result.n2);
  scenario["seed"] = base.seed;
  j["scenario"] = scenario;
  j["config"] = config_json(result.config);
  j["runs"] = result.runs;
  ordered_json rows = ordered_json::array();
  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    ordered_json row;
    row["param"] = result.grid[g];
    row["power"] = result.power[g];
    row["mae"] = result.mae[g];
    rows.push_back(row);
  }
  j["results"] = rows;
  return dump(j);
}

std::string study_csv(const StudyResult& result) {
  std::string out = "param,power,mae,runs\n";
  for (std::size_t g = 0; g < result.grid.size(); ++g)
    out += fmt::format("{},{},{},{}\n", num(result.grid[g]), num(result.power[g]),
                       num(result.mae[g]), result.runs);
  return out;
}

std::string study_summary(const StudyResult& result) {
  std::string out = fmt::format("frechetcp {} simulation study: {}, n1 = {}, n2 = {}, {} runs\n",
                                version, family_info(result.family).name, result.n1, result.n2,
                                result.runs);
  out += calibration_line(result.config);
  out += fmt::format("{:>12} {:>8} {:>8}\n", "param", "power", "mae");
  for (std::size_t g = 0; g < result.grid.size(); ++g)
    out += fmt::format("{:>12.6g} {:>8.4f} {:>8.4f}\n", result.grid[g], result.power[g],
                       result.mae[g]);
  return out;
}

}  // namespace frechetcp
