#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "frechetcp/inference.hpp"
#include "frechetcp/segmentation.hpp"
#include "frechetcp/simulation.hpp"

namespace frechetcp {

/// Version of the JSON layouts written below.
inline constexpr int report_schema_version = 1;

/// Where the tested data came from; echoed into reports.
struct RunContext {
  std::vector<std::string> inputs;
  std::string format;
  /// Empty, or one label per object.
  std::vector<std::string> labels;
};

/// "object k (label)" for the last object before a change after k objects.
std::string describe_change_point(std::size_t k, std::span<const std::string> labels);

std::string test_report_json(const ChangePointReport& report, const RunContext& context);
/// Columns k,u,T_n,v_left,v_right,v_left_cont,v_right_cont.
std::string scan_csv(const ScanProfile& profile);
/// Columns replicate,value in replicate order.
std::string replicates_csv(std::span<const double> replicates);
std::string test_summary(const ChangePointReport& report, const RunContext& context);

std::string segmentation_json(const SegmentationResult& result, const CalibrationConfig& config,
                              const SegmentationOptions& options, const RunContext& context);
/// Columns index,u,p_value,depth; u is the global fraction index / n.
std::string change_points_csv(const SegmentationResult& result);
std::string segmentation_summary(const SegmentationResult& result, const CalibrationConfig& config,
                                 const RunContext& context);

std::string study_json(const StudyResult& result, const ScenarioSpec& base);
/// Columns param,power,mae,runs.
std::string study_csv(const StudyResult& result);
std::string study_summary(const StudyResult& result);

}  // namespace frechetcp
