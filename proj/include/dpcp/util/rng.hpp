#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dpcp {

// splitmix64 step; used to derive independent seeds for sub-streams.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(base ^ mix_seed(stream));
}

// Deterministic uniform sampling on top of std::mt19937_64.
//
// The std::uniform_* distributions are implementation-defined, so every
// bounded draw here is done by hand (rejection sampling / fixed 53-bit
// mantissa scaling) to keep generated instances bit-identical across
// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform real in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * real01(); }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Index draw from non-negative weights; caller guarantees sum > 0.
  std::size_t weighted_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = real01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (r < acc) return i;
    }
    for (std::size_t i = weights.size(); i > 0; --i) {
      if (weights[i - 1] > 0.0) return i - 1;
    }
    return 0;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dpcp
