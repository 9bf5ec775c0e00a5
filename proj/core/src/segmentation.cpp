#include "frechetcp/segmentation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>

#include "frechetcp/error.hpp"

namespace frechetcp {

std::string_view to_string(NodeOutcome outcome) {
  switch (outcome) {
    case NodeOutcome::split: return "split";
    case NodeOutcome::not_rejected: return "not_rejected";
    case NodeOutcome::too_short: return "too_short";
    case NodeOutcome::degenerate: return "degenerate";
  }
  return "unknown";
}

std::size_t default_min_segment_length(double c) {
  return static_cast<std::size_t>(std::ceil(2.0 / c - 1e-9)) + 2;
}

namespace {

void test_node(const ObjectSequence& seq, const CalibrationConfig& config, std::size_t min_len,
               SegmentNode& node) {
  const std::size_t length = node.end - node.begin;
  if (length < min_len || length < minimum_test_length(config)) {
    node.outcome = NodeOutcome::too_short;
    return;
  }
  CalibrationConfig local = config;
  local.alpha = node.alpha;
  local.seed = derive_seed(config.seed, {stream_tag::segmentation, node.begin, node.end});
  try {
    node.report = run_test(seq.subsequence(node.begin, node.end), local);
  } catch (const DegenerateVarianceError&) {
    node.outcome = NodeOutcome::degenerate;
    return;
  }
  node.outcome = node.report->reject && node.report->p_value <= node.alpha
                     ? NodeOutcome::split
                     : NodeOutcome::not_rejected;
}

}  // namespace

SegmentationResult binary_segmentation(const ObjectSequence& seq, const CalibrationConfig& config,
                                       const SegmentationOptions& options) {
  config.validate();
  const std::size_t floor_len = default_min_segment_length(config.c);
  const std::size_t min_len = options.min_len.value_or(floor_len);
  if (min_len < floor_len)
    throw PreconditionError(fmt::format(
        "minimum segment length {} below ceil(2 / c) + 2 = {}", min_len, floor_len));

  SegmentationResult result{seq.size(), {}, {}};
  result.tree.push_back(
      SegmentNode{0, seq.size(), 0, NodeOutcome::too_short, config.alpha, {}, {}, {}});

  std::vector<std::size_t> level{0};
  while (!level.empty()) {
    std::vector<std::exception_ptr> errors(level.size());
    const auto count = static_cast<std::ptrdiff_t>(level.size());
#pragma omp parallel for schedule(dynamic, 1) if (count > 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        test_node(seq, config, min_len, result.tree[level[static_cast<std::size_t>(i)]]);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (auto& error : errors)
      if (error) std::rethrow_exception(error);

    std::vector<std::size_t> next;
    for (std::size_t id : level) {
      if (result.tree[id].outcome != NodeOutcome::split) continue;
      const SegmentNode node = result.tree[id];
      const std::size_t split = node.begin + node.report->tau_hat_index;
      result.change_points.push_back(ChangePoint{split, node.report->tau_hat,
                                                 node.report->p_value, node.depth});
      const double child_alpha =
          options.bonferroni ? node.alpha / 2.0 : config.alpha;
      for (auto [begin, end] : {std::pair{node.begin, split}, std::pair{split, node.end}}) {
        result.tree.push_back(SegmentNode{begin, end, node.depth + 1, NodeOutcome::too_short,
                                          child_alpha, {}, {}, {}});
        next.push_back(result.tree.size() - 1);
      }
      result.tree[id].left_child = next[next.size() - 2];
      result.tree[id].right_child = next.back();
    }
    level = std::move(next);
  }

  std::sort(result.change_points.begin(), result.change_points.end(),
            [](const ChangePoint& a, const ChangePoint& b) { return a.index < b.index; });
  return result;
}

}  // namespace frechetcp
