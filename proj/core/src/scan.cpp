#include "frechetcp/scan.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "frechetcp/error.hpp"
#include "summation.hpp"

namespace frechetcp {
namespace {

struct Centered {
  std::vector<double> mean;       // pooled mean, stored coordinates
  std::vector<double> z;          // y_i - mean, n x p
  std::vector<double> sq_dist;    // d^2(Y_i, mean)
  double variance = 0.0;
  double sigma_sq = 0.0;
};

// All sums over objects are exactly rounded, so the pooled moments do not
// depend on the order of the sequence.
Centered center(const ObjectSequence& seq) {
  const std::size_t n = seq.size();
  const std::size_t p = seq.coord_dim();
  const double w = seq.metric_weight();
  const auto data = seq.data();

  Centered out;
  out.mean.resize(p);
  {
    std::vector<detail::ExactSum> sums(p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) sums[j].add(data[i * p + j]);
    for (std::size_t j = 0; j < p; ++j) out.mean[j] = sums[j].value() / static_cast<double>(n);
  }

  out.z.resize(n * p);
  out.sq_dist.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double zij = data[i * p + j] - out.mean[j];
      out.z[i * p + j] = zij;
      sq += zij * zij;
    }
    out.sq_dist[i] = w * sq;
  }

  out.variance = detail::exact_sum(out.sq_dist) / static_cast<double>(n);
  detail::ExactSum spread;
  for (double d2 : out.sq_dist) {
    const double e = d2 - out.variance;
    spread.add(e * e);
  }
  out.sigma_sq = std::max(0.0, spread.value() / static_cast<double>(n));
  return out;
}

void require_nondegenerate(const Centered& moments) {
  const double threshold = std::max(1e-12, 1e-12 * moments.variance * moments.variance);
  if (moments.variance == 0.0 || moments.sigma_sq <= threshold)
    throw DegenerateVarianceError(fmt::format(
        "degenerate sequence: pooled Fréchet variance {} and variance-of-variance estimate {}",
        moments.variance, moments.sigma_sq));
}

struct ScanResult {
  double max_t = -1.0;
  std::size_t argmax_k = 0;
};

// Evaluates T_n at every split in `range`; `points` is filled when non-null.
ScanResult scan_core(const ObjectSequence& seq, const Centered& moments, SplitRange range,
                     std::vector<ScanPoint>* points) {
  const std::size_t n = seq.size();
  const std::size_t p = seq.coord_dim();
  const double w = seq.metric_weight();
  const auto& z = moments.z;

  // prefix[k] sums objects 0..k-1 front to back; suffix[k] sums objects
  // k..n-1 back to front. A reversed sequence therefore sees bit-identical
  // partial sums with the roles of the two arrays swapped.
  std::vector<double> prefix((n + 1) * p, 0.0);
  std::vector<double> suffix((n + 1) * p, 0.0);
  std::vector<double> prefix_sq(n + 1, 0.0);
  std::vector<double> suffix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j)
      prefix[(i + 1) * p + j] = prefix[i * p + j] + z[i * p + j];
    prefix_sq[i + 1] = prefix_sq[i] + moments.sq_dist[i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = 0; j < p; ++j) suffix[i * p + j] = suffix[(i + 1) * p + j] + z[i * p + j];
    suffix_sq[i] = suffix_sq[i + 1] + moments.sq_dist[i];
  }

  const double nd = static_cast<double>(n);
  ScanResult result;
  if (points) points->reserve(range.last - range.first + 1);
  for (std::size_t k = range.first; k <= range.last; ++k) {
    const double left_n = static_cast<double>(k);
    const double right_n = static_cast<double>(n - k);
    double left_norm = 0.0;
    double right_norm = 0.0;
    double between = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double ml = prefix[k * p + j] / left_n;
      const double mr = suffix[k * p + j] / right_n;
      left_norm += ml * ml;
      right_norm += mr * mr;
      const double diff = ml - mr;
      between += diff * diff;
    }
    between *= w;
    const double v_left = std::max(0.0, prefix_sq[k] / left_n - w * left_norm);
    const double v_right = std::max(0.0, suffix_sq[k] / right_n - w * right_norm);
    const double var_diff = v_left - v_right;
    const double mean_term = between + between;
    const double weight = (left_n * right_n) / (nd * nd);
    const double t = weight / moments.sigma_sq * (var_diff * var_diff + mean_term * mean_term);

    if (t > result.max_t) {
      result.max_t = t;
      result.argmax_k = k;
    }
    if (points)
      points->push_back(ScanPoint{k, left_n / nd, t, v_left, v_right, v_left + between,
                                  v_right + between});
  }
  return result;
}

MetricObject object_from(const ObjectSequence& seq, std::vector<double> coords) {
  return make_object(seq.space(), seq.shape(), std::move(coords), seq.matrix_kind());
}

}  // namespace

PooledMoments pooled_moments(const ObjectSequence& seq) {
  Centered moments = center(seq);
  return PooledMoments{object_from(seq, std::move(moments.mean)), moments.variance,
                       moments.sigma_sq};
}

SegmentStats segment_stats(const ObjectSequence& seq, std::size_t k) {
  const std::size_t n = seq.size();
  if (k < 1 || k >= n)
    throw PreconditionError(fmt::format("split index {} outside [1, {}]", k, n - 1));
  const std::size_t p = seq.coord_dim();
  const double w = seq.metric_weight();

  std::vector<double> mu_left(p, 0.0);
  std::vector<double> mu_right(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& target = i < k ? mu_left : mu_right;
    const auto y = seq.coords(i);
    for (std::size_t j = 0; j < p; ++j) target[j] += y[j];
  }
  for (double& v : mu_left) v /= static_cast<double>(k);
  for (double& v : mu_right) v /= static_cast<double>(n - k);

  auto sq_dist = [&](std::span<const double> y, const std::vector<double>& mu) {
    double sum = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double diff = y[j] - mu[j];
      sum += diff * diff;
    }
    return w * sum;
  };

  double v_left = 0.0, v_left_cont = 0.0, v_right = 0.0, v_right_cont = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    v_left += sq_dist(seq.coords(i), mu_left);
    v_left_cont += sq_dist(seq.coords(i), mu_right);
  }
  for (std::size_t i = k; i < n; ++i) {
    v_right += sq_dist(seq.coords(i), mu_right);
    v_right_cont += sq_dist(seq.coords(i), mu_left);
  }
  const double left_n = static_cast<double>(k);
  const double right_n = static_cast<double>(n - k);
  return SegmentStats{k,
                      left_n / static_cast<double>(n),
                      v_left / left_n,
                      v_right / right_n,
                      v_left_cont / left_n,
                      v_right_cont / right_n,
                      object_from(seq, std::move(mu_left)),
                      object_from(seq, std::move(mu_right))};
}

SplitRange split_range(std::size_t n, double c) {
  if (!(c > 0.0 && c < 0.5))
    throw PreconditionError(fmt::format("cut-off c must lie in (0, 1/2), got {}", c));
  const double nc = static_cast<double>(n) * c;
  // Tolerance absorbs representation error in c (e.g. 0.1 * 300).
  if (nc < 2.0 - 1e-9)
    throw PreconditionError(fmt::format(
        "sequence of length {} too short for cut-off {}: need n * c >= 2", n, c));
  const auto edge = static_cast<std::size_t>(std::ceil(nc - 1e-9));
  return SplitRange{edge, n - edge};
}

ScanProfile scan(const ObjectSequence& seq, double c) {
  const SplitRange range = split_range(seq.size(), c);
  Centered moments = center(seq);
  require_nondegenerate(moments);

  std::vector<ScanPoint> points;
  const ScanResult result = scan_core(seq, moments, range, &points);
  const double n = static_cast<double>(seq.size());
  return ScanProfile{seq.size(),
                     c,
                     std::move(points),
                     moments.sigma_sq,
                     moments.variance,
                     object_from(seq, std::move(moments.mean)),
                     n * result.max_t,
                     result.argmax_k,
                     static_cast<double>(result.argmax_k) / n};
}

double scan_max(const ObjectSequence& seq, double c) {
  const SplitRange range = split_range(seq.size(), c);
  const Centered moments = center(seq);
  require_nondegenerate(moments);
  return static_cast<double>(seq.size()) * scan_core(seq, moments, range, nullptr).max_t;
}

double scan_statistic(const ScanProfile& profile) {
  if (profile.points.empty()) throw PreconditionError("scan profile has no split points");
  double max_t = 0.0;
  for (const auto& point : profile.points) {
    if (!(point.t_value >= 0.0))
      throw PreconditionError(fmt::format("scan profile has invalid T_n at k = {}", point.k));
    max_t = std::max(max_t, point.t_value);
  }
  const double expected = static_cast<double>(profile.n) * max_t;
  if (expected != profile.stat)
    throw PreconditionError("scan profile statistic disagrees with its T_n values");
  return profile.stat;
}

}  // namespace frechetcp
