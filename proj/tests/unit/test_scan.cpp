#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "frechetcp/error.hpp"
#include "frechetcp/scan.hpp"
#include "support.hpp"

using namespace frechetcp;
using frechetcp::testing::gaussian_values;
using frechetcp::testing::random_sequence;
using frechetcp::testing::scalar_sequence;

namespace {

// Textbook scalar statistics, accumulated in long double.
struct ScalarSplit {
  long double v_left, v_right, v_left_cont, v_right_cont, t;
};

ScalarSplit scalar_split(const std::vector<double>& y, std::size_t k) {
  const std::size_t n = y.size();
  long double mean_all = 0, mean_l = 0, mean_r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_all += y[i];
    (i < k ? mean_l : mean_r) += y[i];
  }
  mean_all /= n;
  mean_l /= k;
  mean_r /= (n - k);
  long double var = 0, fourth = 0;
  for (double v : y) {
    const long double d2 = (v - mean_all) * (v - mean_all);
    var += d2;
    fourth += d2 * d2;
  }
  var /= n;
  const long double sigma_sq = fourth / n - var * var;

  ScalarSplit s{0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const long double own = i < k ? mean_l : mean_r;
    const long double other = i < k ? mean_r : mean_l;
    (i < k ? s.v_left : s.v_right) += (y[i] - own) * (y[i] - own);
    (i < k ? s.v_left_cont : s.v_right_cont) += (y[i] - other) * (y[i] - other);
  }
  s.v_left /= k;
  s.v_left_cont /= k;
  s.v_right /= (n - k);
  s.v_right_cont /= (n - k);
  const long double u = static_cast<long double>(k) / n;
  const long double a = s.v_left - s.v_right;
  const long double b = s.v_left_cont - s.v_left + s.v_right_cont - s.v_right;
  s.t = u * (1 - u) / sigma_sq * (a * a + b * b);
  return s;
}

void expect_close(double actual, long double expected, double rel) {
  EXPECT_LE(std::abs(actual - static_cast<double>(expected)),
            rel * std::max(1.0, std::abs(static_cast<double>(expected))))
      << actual << " vs " << static_cast<double>(expected);
}

}  // namespace

TEST(SplitRange, TrimsBothEnds) {
  EXPECT_EQ(split_range(300, 0.1).first, 30u);
  EXPECT_EQ(split_range(300, 0.1).last, 270u);
  EXPECT_EQ(split_range(12, 0.25).first, 3u);
  EXPECT_EQ(split_range(12, 0.25).last, 9u);
  EXPECT_EQ(split_range(25, 0.1).first, 3u);
  EXPECT_EQ(split_range(20, 0.1).first, 2u);
  EXPECT_THROW(split_range(19, 0.1), PreconditionError);
  EXPECT_THROW(split_range(100, 0.5), PreconditionError);
  EXPECT_THROW(split_range(100, 0.0), PreconditionError);
}

TEST(Scan, MatchesScalarOracleAtTwelvePoints) {
  const std::vector<double> y{0.3, -1.2, 0.8, 2.1, -0.4, 0.0, 1.7, 2.9, 3.3, 2.2, 4.0, 2.6};
  const ScanProfile profile = scan(scalar_sequence(y), 0.25);
  ASSERT_EQ(profile.points.size(), 7u);
  double best = -1.0;
  std::size_t best_k = 0;
  for (const auto& p : profile.points) {
    const ScalarSplit s = scalar_split(y, p.k);
    expect_close(p.v_left, s.v_left, 1e-13);
    expect_close(p.v_right, s.v_right, 1e-13);
    expect_close(p.v_left_cont, s.v_left_cont, 1e-13);
    expect_close(p.v_right_cont, s.v_right_cont, 1e-13);
    expect_close(p.t_value, s.t, 1e-12);
    if (static_cast<double>(s.t) > best) {
      best = static_cast<double>(s.t);
      best_k = p.k;
    }
  }
  EXPECT_EQ(profile.argmax_k, best_k);
  EXPECT_DOUBLE_EQ(profile.tau_hat, static_cast<double>(best_k) / 12.0);
  EXPECT_NEAR(profile.stat, 12.0 * best, 1e-11 * 12.0 * best);
}

TEST(Scan, PooledMomentsMatchTextbook) {
  const std::vector<double> y{1.0, 2.0, 4.0, 8.0};
  const PooledMoments m = pooled_moments(scalar_sequence(y));
  // mean 3.75; squared deviations 7.5625, 3.0625, 0.0625, 18.0625.
  EXPECT_DOUBLE_EQ(m.mean.coords()[0], 3.75);
  EXPECT_DOUBLE_EQ(m.variance, 28.75 / 4.0);
  const double v = 28.75 / 4.0;
  double fourth = 0.0;
  for (double d2 : {7.5625, 3.0625, 0.0625, 18.0625}) fourth += d2 * d2;
  EXPECT_NEAR(m.sigma_sq, fourth / 4.0 - v * v, 1e-12);
}

TEST(Scan, SegmentStatsAgreeWithProfile) {
  std::mt19937_64 gen(5);
  for (Space space : {Space::wasserstein, Space::frobenius, Space::euclidean}) {
    const ObjectSequence seq = random_sequence(space, 40, gen);
    const ScanProfile profile = scan(seq, 0.1);
    for (const auto& p : profile.points) {
      const SegmentStats s = segment_stats(seq, p.k);
      EXPECT_NEAR(p.v_left, s.v_left, 1e-10 * (1 + s.v_left));
      EXPECT_NEAR(p.v_right, s.v_right, 1e-10 * (1 + s.v_right));
      EXPECT_NEAR(p.v_left_cont, s.v_left_cont, 1e-10 * (1 + s.v_left_cont));
      EXPECT_NEAR(p.v_right_cont, s.v_right_cont, 1e-10 * (1 + s.v_right_cont));
      EXPECT_DOUBLE_EQ(p.u, s.u);
    }
  }
}

TEST(Scan, ReversalIsExact) {
  std::mt19937_64 gen(6);
  for (Space space : {Space::wasserstein, Space::frobenius, Space::euclidean}) {
    const ObjectSequence seq = random_sequence(space, 37, gen);
    const ScanProfile forward = scan(seq, 0.15);
    const ScanProfile backward = scan(seq.reversed(), 0.15);
    ASSERT_EQ(forward.points.size(), backward.points.size());
    const std::size_t m = forward.points.size();
    for (std::size_t i = 0; i < m; ++i) {
      const ScanPoint& f = forward.points[i];
      const ScanPoint& b = backward.points[m - 1 - i];
      EXPECT_EQ(f.k + b.k, seq.size());
      EXPECT_EQ(f.t_value, b.t_value);
      EXPECT_EQ(f.v_left, b.v_right);
      EXPECT_EQ(f.v_left_cont, b.v_right_cont);
    }
    EXPECT_EQ(forward.stat, backward.stat);
    EXPECT_EQ(forward.sigma_sq, backward.sigma_sq);
  }
}

TEST(Scan, ScaleInvariant) {
  std::mt19937_64 gen(9);
  for (Space space : {Space::wasserstein, Space::frobenius, Space::euclidean}) {
    const ObjectSequence seq = random_sequence(space, 30, gen);
    const ScanProfile base = scan(seq, 0.1);
    const ScanProfile scaled = scan(seq.scaled(3.0), 0.1);
    for (std::size_t i = 0; i < base.points.size(); ++i)
      EXPECT_NEAR(scaled.points[i].t_value, base.points[i].t_value,
                  1e-9 * base.points[i].t_value);
    EXPECT_NEAR(scaled.pooled_var, 9.0 * base.pooled_var, 1e-9 * 9.0 * base.pooled_var);
  }
}

TEST(Scan, ContaminatedVariancesDominate) {
  std::mt19937_64 gen(10);
  for (Space space : {Space::wasserstein, Space::frobenius, Space::euclidean}) {
    for (int trial = 0; trial < 20; ++trial) {
      for (const auto& p : scan(random_sequence(space, 25, gen), 0.1).points) {
        EXPECT_GE(p.v_left_cont, p.v_left);
        EXPECT_GE(p.v_right_cont, p.v_right);
      }
    }
  }
}

TEST(Scan, DegenerateSequencesThrow) {
  EXPECT_THROW(scan(scalar_sequence(std::vector<double>(20, 1.5)), 0.1), DegenerateVarianceError);
  // Every object equidistant from the pooled mean: variance positive but no spread.
  std::vector<double> alternating(20);
  for (std::size_t i = 0; i < 20; ++i) alternating[i] = i % 2 ? 1.0 : -1.0;
  EXPECT_THROW(scan(scalar_sequence(alternating), 0.1), DegenerateVarianceError);
  EXPECT_THROW(scan_max(scalar_sequence(alternating), 0.1), DegenerateVarianceError);
}

TEST(Scan, TooShortThrows) {
  std::mt19937_64 gen(1);
  EXPECT_THROW(scan(scalar_sequence(gaussian_values(19, gen)), 0.1), PreconditionError);
}

TEST(Scan, ScanMaxEqualsProfileStatistic) {
  std::mt19937_64 gen(2);
  const ObjectSequence seq = scalar_sequence(gaussian_values(80, gen));
  const ScanProfile profile = scan(seq, 0.1);
  EXPECT_EQ(scan_max(seq, 0.1), profile.stat);
  EXPECT_EQ(scan_statistic(profile), profile.stat);
  ScanProfile tampered = profile;
  tampered.stat *= 1.5;
  EXPECT_THROW(scan_statistic(tampered), PreconditionError);
}

TEST(Scan, ArgmaxPrefersEarliestTie) {
  // Mirror-symmetric data give mirror-symmetric profiles; a maximum away from
  // the center is attained twice, and the earlier split is reported.
  const std::vector<double> y{0, 0, 0, 5, 0, 0, 1, 0, 0, 5, 0, 0, 0};
  const std::vector<double> mirrored(y.rbegin(), y.rend());
  ASSERT_EQ(y, mirrored);
  const ScanProfile profile = scan(scalar_sequence(y), 0.2);
  double best = 0.0;
  for (const auto& p : profile.points) best = std::max(best, p.t_value);
  std::size_t first = 0;
  for (const auto& p : profile.points)
    if (p.t_value == best) {
      first = p.k;
      break;
    }
  EXPECT_EQ(profile.argmax_k, first);
}

TEST(Scan, StepSequenceLocatesChange) {
  std::vector<double> y(300, 5.0);
  std::fill(y.begin(), y.begin() + 100, 0.0);
  const ScanProfile profile = scan(scalar_sequence(y), 0.1);
  EXPECT_EQ(profile.argmax_k, 100u);
  EXPECT_EQ(profile.tau_hat, 100.0 / 300.0);
}
