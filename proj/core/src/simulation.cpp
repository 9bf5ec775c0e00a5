#include "frechetcp/simulation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <exception>
#include <tuple>
#include <utility>

#include "frechetcp/error.hpp"

namespace frechetcp {
namespace {

constexpr std::array<FamilyInfo, 6> kFamilies{{
    {"wasserstein_location", Space::wasserstein, 100, 0.0, 1.0, 0.0},
    {"wasserstein_scale", Space::wasserstein, 100, 0.4, 1.0, 1.0},
    {"ba_network", Space::frobenius, 10, 1.0, 3.0, 3.0},
    {"mvn_location", Space::euclidean, 50, 0.0, 1.0, 0.0},
    {"mvn_scale", Space::euclidean, 50, 0.75, 1.0, 1.0},
    {"mvn_correlation", Space::euclidean, 50, 0.3, 0.9, 0.9},
}};

constexpr std::array<Family, 6> kFamilyList{
    Family::wasserstein_location, Family::wasserstein_scale, Family::ba_network,
    Family::mvn_location,         Family::mvn_scale,         Family::mvn_correlation};

// Variance of the location draws in the distribution families.
constexpr double kLocationVariance = 0.75;
// Equicorrelation design: 0.9 I + rho^2 J, with rho = 0.9 in the second regime.
constexpr double kCorrelationDiagonal = 0.9;
constexpr double kCorrelationNull = 0.9;

const boost::math::normal_distribution<double> kStandardNormal(0.0, 1.0);

double standard_normal_quantile(double p) { return boost::math::quantile(kStandardNormal, p); }

std::vector<double> truncated_gaussian_vector(std::size_t d, double sd, std::span<const double> mean,
                                              RngStream& rng) {
  std::vector<double> x(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double m = mean.empty() ? 0.0 : mean[j];
    x[j] = truncated_normal(m, sd, -simulation_box, simulation_box, rng);
  }
  return x;
}

// N(0, diag I + rho^2 J) restricted to the box, by rejection of whole vectors.
std::vector<double> equicorrelated_vector(std::size_t d, double rho, RngStream& rng) {
  const double diag_sd = std::sqrt(kCorrelationDiagonal);
  std::vector<double> x(d);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double common = rho * rng.normal();
    bool inside = true;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = diag_sd * rng.normal() + common;
      inside = inside && std::abs(x[j]) <= simulation_box;
    }
    if (inside) return x;
  }
  throw Error("equicorrelated sampler failed to land inside the truncation box");
}

}  // namespace

const FamilyInfo& family_info(Family family) {
  return kFamilies[static_cast<std::size_t>(family)];
}

Family parse_family(std::string_view name) {
  for (Family f : kFamilyList)
    if (family_info(f).name == name) return f;
  throw PreconditionError(fmt::format("unknown scenario family '{}'", name));
}

std::span<const Family> all_families() { return kFamilyList; }

void ScenarioSpec::validate() const {
  const FamilyInfo& info = family_info(family);
  if (n1 < 1 || n2 < 1)
    throw PreconditionError(fmt::format("segment lengths must be positive, got {} and {}", n1, n2));
  if (!(param >= info.min_param - 1e-9 && param <= info.max_param + 1e-9))
    throw PreconditionError(fmt::format("{} parameter {} outside [{}, {}]", info.name, param,
                                        info.min_param, info.max_param));
  const std::size_t s = resolved_shape();
  if (s < 1) throw PreconditionError("scenario shape must be positive");
  if (family == Family::ba_network && s < 2)
    throw PreconditionError("preferential-attachment networks need at least 2 nodes");
  if (family == Family::mvn_location && s < 3)
    throw PreconditionError("mvn_location shifts three coordinates and needs dimension >= 3");
}

double truncated_normal(double mean, double sd, double lo, double hi, RngStream& rng) {
  if (!(sd > 0.0) || !(lo < hi))
    throw PreconditionError(
        fmt::format("invalid truncated normal: sd {} on [{}, {}]", sd, lo, hi));
  double a = (lo - mean) / sd;
  double b = (hi - mean) / sd;
  // Work in the lower tail where the CDF keeps its relative precision.
  const bool flip = a > 0.0;
  if (flip) {
    std::tie(a, b) = std::pair{-b, -a};
  }
  const double pa = boost::math::cdf(kStandardNormal, a);
  const double pb = boost::math::cdf(kStandardNormal, b);
  const double p = pa + rng.uniform() * (pb - pa);
  double z;
  if (p <= 0.0) z = a;
  else if (p >= 1.0) z = b;
  else z = std::clamp(standard_normal_quantile(p), a, b);
  if (flip) z = -z;
  return std::clamp(mean + sd * z, lo, hi);
}

QuantileObject gaussian_quantile_grid(double mean, double sd, std::size_t grid_size) {
  if (grid_size == 0) throw PreconditionError("quantile grid size must be positive");
  std::vector<double> values(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j)
    values[j] = mean + sd * standard_normal_quantile(QuantileObject::grid_point(j, grid_size));
  return QuantileObject(std::move(values));
}

double attachment_power(double gamma) { return 4.0 - gamma; }

SymMatrixObject preferential_attachment_adjacency(std::size_t nodes, double gamma,
                                                  RngStream& rng) {
  if (nodes < 2) throw PreconditionError("a network needs at least 2 nodes");
  const double power = attachment_power(gamma);
  std::vector<double> adjacency(nodes * nodes, 0.0);
  std::vector<double> degree(nodes, 0.0);
  auto link = [&](std::size_t a, std::size_t b) {
    adjacency[a * nodes + b] = adjacency[b * nodes + a] = 1.0;
    degree[a] += 1.0;
    degree[b] += 1.0;
  };
  link(0, 1);
  std::vector<double> kernel(nodes);
  for (std::size_t v = 2; v < nodes; ++v) {
    double total = 0.0;
    for (std::size_t u = 0; u < v; ++u) total += kernel[u] = std::pow(degree[u], power);
    double target = rng.uniform() * total;
    std::size_t chosen = v - 1;
    for (std::size_t u = 0; u < v; ++u) {
      if (target < kernel[u]) {
        chosen = u;
        break;
      }
      target -= kernel[u];
    }
    link(v, chosen);
  }
  return SymMatrixObject(nodes, std::move(adjacency), MatrixKind::adjacency);
}

ObjectSequence gen_sequence(const ScenarioSpec& spec, RngStream& rng) {
  spec.validate();
  const std::size_t shape = spec.resolved_shape();
  const double delta = spec.param;
  std::vector<MetricObject> items;
  items.reserve(spec.n1 + spec.n2);

  for (std::size_t i = 0; i < spec.n1 + spec.n2; ++i) {
    const bool first = i < spec.n1;
    switch (spec.family) {
      case Family::wasserstein_location: {
        const double mu = truncated_normal(first ? delta : 0.0, std::sqrt(kLocationVariance),
                                           -simulation_box, simulation_box, rng);
        items.emplace_back(gaussian_quantile_grid(mu, 1.0, shape));
        break;
      }
      case Family::wasserstein_scale: {
        const double mu = truncated_normal(0.0, std::sqrt(first ? delta : 1.0), -simulation_box,
                                           simulation_box, rng);
        items.emplace_back(gaussian_quantile_grid(mu, 1.0, shape));
        break;
      }
      case Family::ba_network: {
        const double gamma = first ? family_info(spec.family).null_param : delta;
        items.emplace_back(
            laplacian_from_adjacency(preferential_attachment_adjacency(shape, gamma, rng)));
        break;
      }
      case Family::mvn_location: {
        std::vector<double> mean(shape, 0.0);
        if (!first) mean[0] = mean[1] = mean[2] = delta;
        items.emplace_back(EuclideanObject(truncated_gaussian_vector(shape, 1.0, mean, rng)));
        break;
      }
      case Family::mvn_scale: {
        const double sd = std::sqrt(first ? delta : 1.0);
        items.emplace_back(EuclideanObject(truncated_gaussian_vector(shape, sd, {}, rng)));
        break;
      }
      case Family::mvn_correlation: {
        const double rho = first ? delta : kCorrelationNull;
        items.emplace_back(EuclideanObject(equicorrelated_vector(shape, rho, rng)));
        break;
      }
    }
  }
  return ObjectSequence(items);
}

ObjectSequence gen_sequence(const ScenarioSpec& spec) {
  RngStream rng(spec.seed, {stream_tag::study});
  return gen_sequence(spec, rng);
}

std::vector<double> param_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop))
    throw PreconditionError(
        fmt::format("invalid parameter grid {}:{}:{}", start, stop, step));
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
  // Snap a last value that lands on stop up to rounding.
  if (std::abs(grid.back() - stop) <= 1e-9 * step) grid.back() = stop;
  return grid;
}

std::vector<ScenarioSpec> scenario_grid(const ScenarioSpec& base, std::span<const double> params) {
  std::vector<ScenarioSpec> specs;
  specs.reserve(params.size());
  for (double p : params) {
    ScenarioSpec spec = base;
    spec.param = p;
    specs.push_back(spec);
  }
  return specs;
}

namespace {

[[noreturn]] void rethrow_with_context(std::exception_ptr error, const std::string& context) {
  try {
    std::rethrow_exception(error);
  } catch (const DegenerateVarianceError& e) {
    throw DegenerateVarianceError(context + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(context + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(context + ": " + e.what());
  }
}

}  // namespace

StudyResult run_study(std::span<const ScenarioSpec> spec_grid, const CalibrationConfig& config,
                      std::size_t runs) {
  if (runs < 1) throw PreconditionError("a study needs at least one run");
  if (spec_grid.empty()) throw PreconditionError("a study needs at least one scenario");
  config.validate();
  const ScenarioSpec& head = spec_grid.front();
  for (const auto& spec : spec_grid) {
    spec.validate();
    if (spec.family != head.family || spec.n1 != head.n1 || spec.n2 != head.n2)
      throw PreconditionError("all scenarios of a study must share family and segment lengths");
  }

  const std::size_t n = head.n1 + head.n2;
  const double tau = static_cast<double>(head.n1) / static_cast<double>(n);
  std::optional<NullDistribution> shared_null;
  if (config.method == CalibrationMethod::asymptotic) shared_null = asymptotic_null(n, config);

  StudyResult result{head.family, head.n1, head.n2, {}, {}, {}, runs, config};
  for (std::size_t g = 0; g < spec_grid.size(); ++g) {
    const ScenarioSpec& spec = spec_grid[g];
    std::vector<unsigned char> rejected(runs, 0);
    std::vector<double> abs_error(runs, 0.0);
    std::vector<std::exception_ptr> errors(runs);
    const auto total = static_cast<std::ptrdiff_t>(runs);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t ri = 0; ri < total; ++ri) {
      const auto r = static_cast<std::size_t>(ri);
      try {
        RngStream rng(spec.seed, {stream_tag::study, r});
        const ObjectSequence seq = gen_sequence(spec, rng);
        CalibrationConfig local = config;
        local.seed = derive_seed(config.seed, {stream_tag::study, g, r});
        const ChangePointReport report =
            shared_null ? run_test(seq, local, *shared_null) : run_test(seq, local);
        rejected[r] = report.reject ? 1 : 0;
        abs_error[r] = std::abs(report.tau_hat - tau);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
    for (std::size_t r = 0; r < runs; ++r) {
      if (errors[r])
        rethrow_with_context(
            errors[r], fmt::format("{} = {} run {} (scenario seed {}, test seed {})",
                                   family_info(spec.family).name, spec.param, r, spec.seed,
                                   derive_seed(config.seed, {stream_tag::study, g, r})));
    }
    double rejections = 0.0;
    double error_sum = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      rejections += rejected[r];
      error_sum += abs_error[r];
    }
    result.grid.push_back(spec.param);
    result.power.push_back(rejections / static_cast<double>(runs));
    result.mae.push_back(error_sum / static_cast<double>(runs));
  }
  return result;
}

}  // namespace frechetcp
