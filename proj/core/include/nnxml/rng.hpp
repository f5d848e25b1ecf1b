#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace nnxml {

struct RngSeed {
  std::uint64_t value = 0;
};

/// Seeded pseudo-random stream. Built on std::mt19937_64, whose output
/// sequence is fixed by the standard; the conversions to doubles and bounded
/// integers below are done by hand so that streams do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nnxml
