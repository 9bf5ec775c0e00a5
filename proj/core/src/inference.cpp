#include "frechetcp/inference.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>

#include "frechetcp/error.hpp"

namespace frechetcp {
namespace {

// Runs body(i) for i in [0, count) on the OpenMP team, each writing its own
// slot. The first exception (by index) is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t count, Body body) {
  std::vector<std::exception_ptr> errors(count);
  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& error : errors)
    if (error) std::rethrow_exception(error);
}

std::size_t ceil_with_tolerance(double x) {
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

}  // namespace

std::string_view to_string(CalibrationMethod method) {
  return method == CalibrationMethod::asymptotic ? "asymptotic" : "bootstrap";
}

CalibrationMethod parse_calibration_method(std::string_view name) {
  if (name == "asymptotic") return CalibrationMethod::asymptotic;
  if (name == "bootstrap") return CalibrationMethod::bootstrap;
  throw PreconditionError(fmt::format("unknown calibration method '{}'", name));
}

std::size_t CalibrationConfig::replicates() const {
  if (num_replicates) return *num_replicates;
  return method == CalibrationMethod::bootstrap ? default_bootstrap_replicates
                                                : default_bridge_replicates;
}

std::size_t CalibrationConfig::resample_size(std::size_t n) const {
  return bootstrap_m.value_or(n);
}

void CalibrationConfig::validate() const {
  if (!(c > 0.0 && c < 0.5))
    throw PreconditionError(fmt::format("cut-off c must lie in (0, 1/2), got {}", c));
  if (!(alpha > 0.0 && alpha < 1.0))
    throw PreconditionError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  const std::size_t r = replicates();
  if (r < 100)
    throw PreconditionError(fmt::format("at least 100 replicates are required, got {}", r));
  if (r < 500) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true))
      warn(fmt::format("{} replicates is below the recommended minimum of 500", r));
  }
}

std::vector<double> standardized_bridge_path(std::span<const double> grid, RngStream& rng) {
  if (grid.empty()) throw PreconditionError("bridge grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0))
      throw PreconditionError(fmt::format("bridge grid point {} outside (0, 1)", grid[i]));
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw PreconditionError("bridge grid must be strictly increasing");
  }
  std::vector<double> wiener(grid.size());
  double w = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w += std::sqrt(grid[i] - previous) * rng.normal();
    wiener[i] = w;
    previous = grid[i];
  }
  const double w_one = w + std::sqrt(1.0 - previous) * rng.normal();

  std::vector<double> path(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid[i];
    path[i] = (wiener[i] - u * w_one) / std::sqrt(u * (1.0 - u));
  }
  return path;
}

double bridge_sup_replicate(std::span<const double> grid, RngStream& rng) {
  double best = 0.0;
  for (double g : standardized_bridge_path(grid, rng)) best = std::max(best, g * g);
  return best;
}

std::vector<double> scan_grid(std::size_t n, double c) {
  const SplitRange range = split_range(n, c);
  std::vector<double> grid;
  grid.reserve(range.last - range.first + 1);
  for (std::size_t k = range.first; k <= range.last; ++k)
    grid.push_back(static_cast<double>(k) / static_cast<double>(n));
  return grid;
}

double order_statistic_quantile(std::span<const double> replicates, double alpha) {
  if (replicates.empty()) throw PreconditionError("no replicates to take a quantile of");
  std::vector<double> sorted(replicates.begin(), replicates.end());
  const std::size_t rank = std::clamp<std::size_t>(
      ceil_with_tolerance((1.0 - alpha) * static_cast<double>(sorted.size())), 1, sorted.size());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   sorted.end());
  return sorted[rank - 1];
}

double add_one_p_value(std::span<const double> replicates, double stat) {
  const auto exceed = std::count_if(replicates.begin(), replicates.end(),
                                    [stat](double r) { return r >= stat; });
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates.size()) + 1.0);
}

NullDistribution asymptotic_null(std::size_t n, const CalibrationConfig& config) {
  config.validate();
  const std::vector<double> grid = scan_grid(n, config.c);
  NullDistribution null;
  null.replicates.resize(config.replicates());
  parallel_for(null.replicates.size(), [&](std::size_t r) {
    RngStream rng(config.seed, {stream_tag::bridge, r});
    null.replicates[r] = bridge_sup_replicate(grid, rng);
  });
  null.critical_value = order_statistic_quantile(null.replicates, config.alpha);
  return null;
}

double asymptotic_critical_value(std::size_t n, const CalibrationConfig& config) {
  return asymptotic_null(n, config).critical_value;
}

NullDistribution bootstrap_critical_value(const ObjectSequence& seq,
                                          const CalibrationConfig& config) {
  config.validate();
  // Rejects degenerate data before any resampling.
  (void)scan(seq, config.c);
  const std::size_t n = seq.size();
  const std::size_t m = config.resample_size(n);
  if (static_cast<double>(m) * config.c < 4.0 - 1e-9)
    throw PreconditionError(fmt::format(
        "bootstrap resample size {} too small for cut-off {}: need m >= 4 / c", m, config.c));

  NullDistribution null;
  null.replicates.resize(config.replicates());
  std::vector<unsigned char> degenerate(null.replicates.size(), 0);
  parallel_for(null.replicates.size(), [&](std::size_t b) {
    std::vector<std::size_t> indices(m);
    for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
      RngStream rng(config.seed, {stream_tag::bootstrap, b, attempt});
      for (auto& idx : indices) idx = rng.index(n);
      try {
        null.replicates[b] = scan_max(seq.resample(indices), config.c);
        return;
      } catch (const DegenerateVarianceError&) {
      }
    }
    null.replicates[b] = std::numeric_limits<double>::infinity();
    degenerate[b] = 1;
  });
  null.degenerate = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  if (null.degenerate > 0)
    warn(fmt::format("{} of {} bootstrap resamples were degenerate and scored as +infinity",
                     null.degenerate, null.replicates.size()));
  null.critical_value = order_statistic_quantile(null.replicates, config.alpha);
  return null;
}

namespace {

ChangePointReport make_report(ScanProfile profile, const CalibrationConfig& config,
                              const NullDistribution& null) {
  const double stat = profile.stat;
  const double tau_hat = profile.tau_hat;
  const std::size_t argmax_k = profile.argmax_k;
  return ChangePointReport{stat,
                           null.critical_value,
                           add_one_p_value(null.replicates, stat),
                           stat > null.critical_value,
                           tau_hat,
                           argmax_k,
                           config,
                           null.replicates.size(),
                           null.degenerate,
                           std::move(profile),
                           null.replicates};
}

}  // namespace

ChangePointReport run_test(const ObjectSequence& seq, const CalibrationConfig& config,
                           const NullDistribution& null) {
  config.validate();
  return make_report(scan(seq, config.c), config, null);
}

ChangePointReport run_test(const ObjectSequence& seq, const CalibrationConfig& config) {
  config.validate();
  ScanProfile profile = scan(seq, config.c);
  NullDistribution null = config.method == CalibrationMethod::asymptotic
                              ? asymptotic_null(seq.size(), config)
                              : bootstrap_critical_value(seq, config);
  return make_report(std::move(profile), config, null);
}

std::size_t minimum_test_length(const CalibrationConfig& config) {
  const std::size_t scan_min = ceil_with_tolerance(2.0 / config.c);
  if (config.method == CalibrationMethod::bootstrap && !config.bootstrap_m)
    return std::max(scan_min, ceil_with_tolerance(4.0 / config.c));
  return scan_min;
}

}  // namespace frechetcp
