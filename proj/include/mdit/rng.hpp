#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mdit {

// Seeded generator used by every stochastic stage. The engine is mt19937_64,
// whose output sequence is fixed by the standard; the distributions below are
// written out by hand because the <random> distributions are not portable
// bit-for-bit across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  // Fisher-Yates shuffle in place.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Per-stage seeds: mix64(global_seed + stage * 0x9E3779B97F4A7C15).
enum class Stage : std::uint64_t {
  Embedding = 1,
  Interpolation = 2,
  Clustering = 3,
  ModelInit = 4,
  Training = 5,
};

std::uint64_t derive_seed(std::uint64_t global_seed, Stage stage);

}  // namespace mdit
