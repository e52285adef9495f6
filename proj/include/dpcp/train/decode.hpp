#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "dpcp/dp/problem.hpp"
#include "dpcp/rl/env.hpp"

namespace dpcp::train {

// Follows the highest-scoring feasible control at every stage. `score`
// returns one value per entry of `feasible`; ties take the lowest control
// value (feasible is listed in ascending order).
template <DpProblem P, typename Score>
rl::Rollout greedy_decode(const P& p, Score&& score,
                          const rl::ShapingConfig& cfg) {
  return rl::rollout(
      p,
      [&](const typename P::State& s, int stage, std::span<const int> feas) {
        std::vector<double> sc = score(s, stage, feas);
        int best = 0;
        for (int i = 1; i < static_cast<int>(feas.size()); ++i)
          if (sc[i] > sc[best]) best = i;
        return feas[best];
      },
      cfg);
}

struct BeamResult {
  bool feasible = false;
  double objective = 0.0;  // raw return including the terminal adjustment
  std::vector<int> assignment;
};

namespace detail {

// One fixed-width pass: keeps the `width` highest cumulative scores per
// stage, breaking ties toward the lexicographically smallest assignment;
// returns the completed path with the best raw objective, ties again toward
// the smallest assignment.
template <DpProblem P, typename LogProb>
BeamResult beam_pass(const P& p, LogProb&& logprob, int width) {
  struct Entry {
    typename P::State state;
    double raw = 0.0;
    double score = 0.0;  // cumulative log-probability
    std::vector<int> assignment;
  };

  BeamResult out;
  std::vector<Entry> beam{{p.initial_state(), 0.0, 0.0, {}}};
  for (int stage = 0; stage < p.n_stages(); ++stage) {
    std::vector<Entry> next;
    for (const Entry& e : beam) {
      auto feas = feasible_controls(p, e.state, stage);
      if (feas.empty()) continue;
      std::vector<double> lp =
          logprob(e.state, stage, std::span<const int>(feas));
      for (int i = 0; i < static_cast<int>(feas.size()); ++i) {
        auto [s2, r] = apply(p, e.state, stage, feas[i]);
        Entry e2{std::move(s2), e.raw + r, e.score + lp[i], e.assignment};
        e2.assignment.push_back(feas[i]);
        next.push_back(std::move(e2));
      }
    }
    std::sort(next.begin(), next.end(), [](const Entry& a, const Entry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.assignment < b.assignment;
    });
    if (static_cast<int>(next.size()) > width) next.resize(width);
    beam = std::move(next);
    if (beam.empty()) return out;  // every path dead-ended
  }
  for (Entry& e : beam) e.raw += p.terminal_adjustment(e.state);
  const Entry* best = nullptr;
  for (const Entry& e : beam)
    if (!best || e.raw > best->raw ||
        (e.raw == best->raw && e.assignment < best->assignment))
      best = &e;
  out.feasible = true;
  out.objective = best->raw;
  out.assignment = best->assignment;
  return out;
}

}  // namespace detail

// Iterative-widening beam search: fixed-width passes at 1, 2, 4, ... up to
// `width`, answering with the best completed path seen by any pass (ties
// toward the smallest assignment). Width 1 reduces to greedy_decode under
// the same scorer, and because the pass set only grows, the objective is
// non-decreasing whenever the width doubles. A single truncated pass has
// neither property: a wider beam can flood out the very prefix a narrower
// one completed.
template <DpProblem P, typename LogProb>
BeamResult beam_decode(const P& p, LogProb&& logprob, int width) {
  BeamResult best;
  for (int w = 1;; w = std::min(w * 2, width)) {
    BeamResult res = detail::beam_pass(p, logprob, w);
    if (res.feasible &&
        (!best.feasible || res.objective > best.objective ||
         (res.objective == best.objective && res.assignment < best.assignment)))
      best = std::move(res);
    if (w >= width) break;
  }
  return best;
}

}  // namespace dpcp::train
