#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace frechetcp {

/// Mixes a root seed with a path of stream identifiers (splitmix64 chain).
/// Distinct paths give statistically independent engines, so a replicate's
/// randomness depends only on (seed, path) and never on scheduling order.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// A private random stream owned by a single task.
class RngStream {
 public:
  using Engine = std::mt19937_64;

  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : engine_(derive_seed(seed, path)) {}

  Engine& engine() { return engine_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  Engine engine_;
};

// Stream tags keep the sub-streams of different consumers apart.
namespace stream_tag {
inline constexpr std::uint64_t bridge = 0x62726964ULL;
inline constexpr std::uint64_t bootstrap = 0x626f6f74ULL;
inline constexpr std::uint64_t study = 0x73747564ULL;
inline constexpr std::uint64_t segmentation = 0x7365676dULL;
}  // namespace stream_tag

}  // namespace frechetcp
