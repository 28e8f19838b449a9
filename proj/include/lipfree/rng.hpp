#pragma once

#include <cstdint>
#include <random>

namespace lipfree {

// Seeded generator for randomized suites. The algorithm identifier travels with
// every report so a run can be replicated from the recorded seed alone. The
// uniform mappings are hand-rolled on top of the raw 64-bit stream; standard
// library distributions are avoided because their output is not pinned by the
// standard.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive bounds. Modulo bias is irrelevant at the ranges used here.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool coin(double p = 0.5) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lipfree
