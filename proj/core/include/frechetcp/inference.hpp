#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "frechetcp/rng.hpp"
#include "frechetcp/scan.hpp"
#include "frechetcp/sequence.hpp"

namespace frechetcp {

enum class CalibrationMethod { asymptotic, bootstrap };

std::string_view to_string(CalibrationMethod method);
CalibrationMethod parse_calibration_method(std::string_view name);

inline constexpr std::size_t default_bootstrap_replicates = 1000;
inline constexpr std::size_t default_bridge_replicates = 100000;

struct CalibrationConfig {
  double c = 0.1;
  double alpha = 0.05;
  CalibrationMethod method = CalibrationMethod::bootstrap;
  /// Unset means 1000 bootstrap resamples or 10^5 bridge paths.
  std::optional<std::size_t> num_replicates;
  /// Bootstrap resample size; unset means m = n.
  std::optional<std::size_t> bootstrap_m;
  std::uint64_t seed = 0;

  std::size_t replicates() const;
  std::size_t resample_size(std::size_t n) const;
  /// Throws PreconditionError for alpha or c outside (0, 1) / (0, 1/2) or
  /// fewer than 100 replicates. Warns (once per process) below 500.
  void validate() const;
};

/// Simulated values of the standardized Brownian bridge B(u) / sqrt(u (1 - u))
/// at the points of `grid`, which must be strictly increasing inside (0, 1).
/// The Wiener process is built from independent Gaussian increments between
/// consecutive grid points, which is exact in law at those points.
std::vector<double> standardized_bridge_path(std::span<const double> grid, RngStream& rng);

/// max over the grid of the squared standardized bridge.
double bridge_sup_replicate(std::span<const double> grid, RngStream& rng);

/// The scan grid {k / n : ceil(n c) <= k <= n - ceil(n c)}.
std::vector<double> scan_grid(std::size_t n, double c);

/// Empirical (1 - alpha) quantile by order statistic: the ceil((1 - alpha) R)-th
/// smallest replicate.
double order_statistic_quantile(std::span<const double> replicates, double alpha);

/// (1 + #{replicates >= stat}) / (R + 1).
double add_one_p_value(std::span<const double> replicates, double stat);

/// Replicates of a null distribution, in replicate-index order.
struct NullDistribution {
  std::vector<double> replicates;
  double critical_value;
  /// Replicates that were degenerate twice and scored as +infinity.
  std::size_t degenerate = 0;
};

/// Monte-Carlo law of sup G^2 on the scan grid of a length-n sequence.
NullDistribution asymptotic_null(std::size_t n, const CalibrationConfig& config);
double asymptotic_critical_value(std::size_t n, const CalibrationConfig& config);

/// Resampling law of the scan statistic: B resamples of size m drawn with
/// replacement, each scanned exactly like the observed data. A degenerate
/// resample is redrawn once and then scored as +infinity. Requires m >= 4 / c.
NullDistribution bootstrap_critical_value(const ObjectSequence& seq, const CalibrationConfig& config);

struct ChangePointReport {
  double stat;
  double critical_value;
  double p_value;
  bool reject;
  double tau_hat;
  std::size_t tau_hat_index;
  CalibrationConfig config;
  std::size_t replicates_used;
  std::size_t degenerate_replicates;
  ScanProfile profile;
  std::vector<double> replicates;
};

/// Scans the sequence, calibrates by the configured method and decides
/// reject <=> stat > critical value.
ChangePointReport run_test(const ObjectSequence& seq, const CalibrationConfig& config);

/// As above with a precomputed null law (reused across sequences of equal
/// length under asymptotic calibration).
ChangePointReport run_test(const ObjectSequence& seq, const CalibrationConfig& config,
                           const NullDistribution& null);

/// Shortest sequence the configured test accepts.
std::size_t minimum_test_length(const CalibrationConfig& config);

}  // namespace frechetcp
