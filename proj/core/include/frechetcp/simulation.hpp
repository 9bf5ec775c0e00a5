#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "frechetcp/inference.hpp"
#include "frechetcp/metric_space.hpp"
#include "frechetcp/rng.hpp"
#include "frechetcp/sequence.hpp"

namespace frechetcp {

/// Synthetic two-regime designs. The first n1 objects come from regime 1
/// (driven by the family parameter), the remaining n2 from regime 2.
enum class Family {
  /// N(mu, 1) distributions, mu ~ TN(param, 0.75) then TN(0, 0.75) on [-10, 10].
  wasserstein_location,
  /// N(mu, 1) distributions, mu ~ TN(0, param) then TN(0, 1) on [-10, 10].
  wasserstein_scale,
  /// Laplacians of preferential-attachment trees, exponent 3 then param.
  ba_network,
  /// N(0, I) then N((param, param, param, 0, ..., 0), I) on [-10, 10]^d.
  mvn_location,
  /// N(0, param I) then N(0, I) on [-10, 10]^d.
  mvn_scale,
  /// N(0, 0.9 I + param^2 J) then N(0, 0.9 I + 0.81 J) on [-10, 10]^d.
  mvn_correlation,
};

struct FamilyInfo {
  std::string_view name;
  Space space;
  std::size_t default_shape;
  double min_param;
  double max_param;
  /// Parameter value at which both regimes coincide.
  double null_param;
};

const FamilyInfo& family_info(Family family);
Family parse_family(std::string_view name);
std::span<const Family> all_families();

/// Truncation box of every simulated coordinate and location parameter.
inline constexpr double simulation_box = 10.0;

struct ScenarioSpec {
  Family family = Family::wasserstein_location;
  std::size_t n1 = 100;
  std::size_t n2 = 200;
  double param = 0.0;
  /// Grid size M, node count r, or dimension d; unset uses the family default.
  std::optional<std::size_t> shape;
  std::uint64_t seed = 0;

  std::size_t resolved_shape() const { return shape.value_or(family_info(family).default_shape); }
  /// Throws PreconditionError for empty segments, a parameter outside the
  /// family's range, or an unusable shape.
  void validate() const;
};

/// Draw from N(mean, sd^2) conditioned on [lo, hi], by inverse CDF.
double truncated_normal(double mean, double sd, double lo, double hi, RngStream& rng);

/// Quantile function of N(mean, sd^2) on the midpoint grid of size M.
QuantileObject gaussian_quantile_grid(double mean, double sd, std::size_t grid_size);

/// Attachment kernel exponent used for a target degree exponent gamma:
/// 4 - gamma, so gamma = 3 is linear preferential attachment and smaller
/// gamma concentrates edges on hubs.
double attachment_power(double gamma);

/// Unit-weight adjacency of a preferential-attachment tree: starting from one
/// edge, each new node links to one existing node chosen with probability
/// proportional to degree^attachment_power(gamma).
SymMatrixObject preferential_attachment_adjacency(std::size_t nodes, double gamma,
                                                  RngStream& rng);

ObjectSequence gen_sequence(const ScenarioSpec& spec, RngStream& rng);
/// Uses a stream derived from spec.seed.
ObjectSequence gen_sequence(const ScenarioSpec& spec);

/// Values start, start + step, ..., up to stop (inclusive within 1e-9 step).
std::vector<double> param_grid(double start, double stop, double step);

/// One spec per parameter value, all sharing the remaining fields.
std::vector<ScenarioSpec> scenario_grid(const ScenarioSpec& base, std::span<const double> params);

struct StudyResult {
  Family family;
  std::size_t n1;
  std::size_t n2;
  std::vector<double> grid;
  /// Rejection fraction per grid value.
  std::vector<double> power;
  /// Mean |tau_hat - tau| per grid value over all runs, tau = n1 / (n1 + n2).
  std::vector<double> mae;
  std::size_t runs;
  CalibrationConfig config;
};

/// Tests `runs` independent sequences per scenario. Run r of every scenario
/// generates from the stream (spec.seed, r), so grid values share common
/// random numbers; its test uses a seed derived from (config.seed, g, r).
/// All scenarios must share the family and segment lengths.
StudyResult run_study(std::span<const ScenarioSpec> spec_grid, const CalibrationConfig& config,
                      std::size_t runs);

}  // namespace frechetcp
