#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace frechetcp::detail {

/// Correctly rounded floating-point sum (Shewchuk's partials algorithm).
/// The result does not depend on the order of the terms, which keeps
/// statistics of a reversed sequence bit-identical to the original.
class ExactSum {
 public:
  void add(double x) {
    std::size_t used = 0;
    for (double y : partials_) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[used++] = lo;
      x = hi;
    }
    partials_.resize(used);
    partials_.push_back(x);
  }

  double value() const {
    if (partials_.empty()) return 0.0;
    std::size_t i = partials_.size() - 1;
    double hi = partials_[i];
    double lo = 0.0;
    while (i > 0) {
      const double x = hi;
      const double y = partials_[--i];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    // Round-half-even correction across the remaining partials.
    if (i > 0 && ((lo < 0.0 && partials_[i - 1] < 0.0) || (lo > 0.0 && partials_[i - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

inline double exact_sum(std::span<const double> values) {
  ExactSum sum;
  for (double v : values) sum.add(v);
  return sum.value();
}

}  // namespace frechetcp::detail
