#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "frechetcp/inference.hpp"
#include "frechetcp/sequence.hpp"

namespace frechetcp {

struct ChangePoint {
  /// Number of objects before the change in the full sequence, so the change
  /// happens between Y_index and Y_{index+1} (1-based).
  std::size_t index;
  /// Estimated fraction within the tested segment.
  double tau_local;
  double p_value;
  std::size_t depth;
};

enum class NodeOutcome { split, not_rejected, too_short, degenerate };

std::string_view to_string(NodeOutcome outcome);

/// One tested (or skipped) interval [begin, end) of the full sequence.
struct SegmentNode {
  std::size_t begin;
  std::size_t end;
  std::size_t depth;
  NodeOutcome outcome;
  /// Significance level the node was tested at.
  double alpha;
  std::optional<ChangePointReport> report;
  std::optional<std::size_t> left_child;
  std::optional<std::size_t> right_child;
};

struct SegmentationResult {
  std::size_t n;
  /// Sorted by index.
  std::vector<ChangePoint> change_points;
  /// Node 0 is the full sequence; children are referenced by position.
  std::vector<SegmentNode> tree;
};

struct SegmentationOptions {
  /// Shortest segment that is tested; unset means ceil(2 / c) + 2.
  std::optional<std::size_t> min_len;
  /// Test a node at depth h at level alpha / 2^h.
  bool bonferroni = false;
};

std::size_t default_min_segment_length(double c);

/// Recursive binary segmentation. A node is split at its estimated change
/// point when its test rejects with p-value <= alpha; children are the
/// objects before and after the split. Segments shorter than the minimum
/// length (or than the calibration needs) and degenerate segments end their
/// branch without error. Each node draws from a random stream keyed by its
/// interval, so the tree does not depend on evaluation order.
SegmentationResult binary_segmentation(const ObjectSequence& seq, const CalibrationConfig& config,
                                       const SegmentationOptions& options = {});

}  // namespace frechetcp
