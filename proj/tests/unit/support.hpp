#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "frechetcp/metric_space.hpp"
#include "frechetcp/sequence.hpp"

namespace frechetcp::testing {

inline ObjectSequence scalar_sequence(const std::vector<double>& values) {
  std::vector<MetricObject> items;
  for (double v : values) items.emplace_back(EuclideanObject({v}));
  return ObjectSequence(items);
}

inline std::vector<double> gaussian_values(std::size_t n, std::mt19937_64& gen, double mean = 0.0,
                                           double sd = 1.0) {
  std::normal_distribution<double> dist(mean, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

inline QuantileObject random_quantiles(std::size_t m, std::mt19937_64& gen) {
  std::normal_distribution<double> step(0.0, 1.0);
  std::vector<double> q(m);
  double x = step(gen);
  for (auto& v : q) {
    x += std::abs(step(gen)) * 0.1;
    v = x;
  }
  return QuantileObject(q);
}

inline SymMatrixObject random_symmetric(std::size_t r, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> a(r * r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < r; ++j) a[i * r + j] = a[j * r + i] = dist(gen);
  return SymMatrixObject(r, a);
}

inline EuclideanObject random_vector(std::size_t d, std::mt19937_64& gen) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x(d);
  for (auto& v : x) v = dist(gen);
  return EuclideanObject(x);
}

inline ObjectSequence random_sequence(Space space, std::size_t n, std::mt19937_64& gen) {
  std::vector<MetricObject> items;
  for (std::size_t i = 0; i < n; ++i) {
    switch (space) {
      case Space::wasserstein: items.emplace_back(random_quantiles(8, gen)); break;
      case Space::frobenius: items.emplace_back(random_symmetric(3, gen)); break;
      case Space::euclidean: items.emplace_back(random_vector(4, gen)); break;
    }
  }
  return ObjectSequence(items);
}

}  // namespace frechetcp::testing
