#pragma once

#include <cstdint>
#include <vector>

#include "dpcp/util/rng.hpp"

namespace dpcp::train {

// Seed streams, so instance draws, exploration, and minibatch shuffles
// never reuse random numbers across purposes or episodes.
inline constexpr std::uint64_t kEpisodeStream = 0x45505300;     // per episode
inline constexpr std::uint64_t kValidationStream = 0x56414c00;  // per instance
inline constexpr std::uint64_t kUpdateStream = 0x55504400;      // per update

// Draws an index from a probability vector. Entries masked to exactly zero
// can never be chosen; the fallback for accumulated rounding shortfall is
// the last positive entry.
inline int sample_index(const std::vector<double>& probs, Rng& rng) {
  double r = rng.real01();
  double acc = 0.0;
  int last_positive = -1;
  for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    acc += probs[i];
    if (r < acc) return i;
  }
  return last_positive;
}

// Suffix sums: out[i] = rewards[i] + rewards[i+1] + ...
inline std::vector<double> returns_to_go(const std::vector<double>& rewards) {
  std::vector<double> out(rewards.size());
  double g = 0.0;
  for (int i = static_cast<int>(rewards.size()) - 1; i >= 0; --i) {
    g += rewards[i];
    out[i] = g;
  }
  return out;
}

// One evaluation pass over the held-out instance set.
struct ValidationPoint {
  std::int64_t episode = 0;
  double average_return = 0.0;  // shaped, greedy policy
  int complete = 0;             // episodes that reached the final stage
};

}  // namespace dpcp::train
