#pragma once

#include <cstdint>
#include <random>

namespace hardytree {

// Deterministic uniform stream. The [0,1) draw uses the top 53 bits of the
// engine directly so results are identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range via rejection-free scaling (bias negligible for
  // the small ranges used here, but keep it exact anyway).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t bound = ~std::uint64_t{0} - ~std::uint64_t{0} % span;
    std::uint64_t x = eng_();
    while (x >= bound) x = eng_();
    return lo + static_cast<std::int64_t>(x % span);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hardytree
