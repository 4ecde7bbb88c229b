#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace dsched {

// mt19937_64 with hand-rolled draw formulas. std::uniform_*_distribution is
// implementation-defined, so streams would differ across standard libraries;
// these draws are bit-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform on {0, ..., n-1}, rejection sampled so it is unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::domain_error("Rng::below: n == 0");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t threshold = max - (max % n + 1) % n;
    std::uint64_t x = gen_();
    while (x > threshold) x = gen_();
    return x % n;
  }

  // Uniform integer on [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw std::domain_error("Rng::uniform_int: empty range");
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dsched
