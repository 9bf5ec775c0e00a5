#pragma once

#include <cstddef>
#include <vector>

#include "frechetcp/metric_space.hpp"
#include "frechetcp/sequence.hpp"

namespace frechetcp {

/// Pooled Fréchet mean, Fréchet variance V, and the variance-of-variance
/// estimate sigma^2 = (1/n) sum d^4(Y_i, mean) - V^2 (clamped at 0).
struct PooledMoments {
  MetricObject mean;
  double variance;
  double sigma_sq;
};

PooledMoments pooled_moments(const ObjectSequence& seq);

/// Statistics of the split into Y_1..Y_k and Y_{k+1}..Y_n.
struct SegmentStats {
  std::size_t k;
  double u;
  double v_left;
  double v_right;
  /// Left segment's mean squared distance to the right segment's mean.
  double v_left_cont;
  /// Right segment's mean squared distance to the left segment's mean.
  double v_right_cont;
  MetricObject mu_left;
  MetricObject mu_right;
};

/// Direct evaluation from distances to the two segment means.
/// Requires 1 <= k <= n - 1.
SegmentStats segment_stats(const ObjectSequence& seq, std::size_t k);

/// Admissible split indices ceil(n c) <= k <= n - ceil(n c).
struct SplitRange {
  std::size_t first;
  std::size_t last;
};

/// Throws PreconditionError unless 0 < c < 1/2 and n c >= 2.
SplitRange split_range(std::size_t n, double c);

/// One evaluated split of the scan function.
struct ScanPoint {
  std::size_t k;
  double u;
  double t_value;
  double v_left;
  double v_right;
  double v_left_cont;
  double v_right_cont;
};

/// The scan function over all admissible splits.
struct ScanProfile {
  std::size_t n;
  double c;
  std::vector<ScanPoint> points;
  double sigma_sq;
  double pooled_var;
  MetricObject pooled_mean;
  /// n * max_k T_n(k / n).
  double stat;
  /// Smallest maximizing split index.
  std::size_t argmax_k;
  double tau_hat;
};

/// Evaluates T_n(k/n) at every admissible split.
///
/// Segment means come from prefix and suffix sums of the stored coordinates,
/// so a split costs O(p) and the whole profile O(n p). Because the spaces are
/// flat, the contaminated variances follow from
///   V^C_left = V_left + d^2(mu_left, mu_right)
/// (and the mirror identity on the right), which is exact for these spaces.
///
/// Throws DegenerateVarianceError when V = 0 or sigma^2 <= max(1e-12, 1e-12 V^2),
/// and PreconditionError for an invalid cut-off.
ScanProfile scan(const ObjectSequence& seq, double c);

/// Only the statistic n * max_k T_n(k / n); same preconditions as scan().
double scan_max(const ObjectSequence& seq, double c);

/// Re-validates the profile and returns its statistic.
double scan_statistic(const ScanProfile& profile);

}  // namespace frechetcp
