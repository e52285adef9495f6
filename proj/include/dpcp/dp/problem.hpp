#pragma once

#include <concepts>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dpcp/util/key.hpp"

namespace dpcp {

struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct InvalidTransition : std::runtime_error {
  InvalidTransition(int stage_, int value_)
      : std::runtime_error("infeasible transition at stage " +
                           std::to_string(stage_) + ", value " +
                           std::to_string(value_)),
        stage(stage_),
        value(value_) {}
  int stage;
  int value;
};

// Staged decision problem contract. A problem exposes `n_stages()` decisions;
// stage indices are 0-based (stage i assigns the i-th control). Controls are
// integers drawn from `control_domain(stage)`; action ids used by masks and
// value networks range over [0, action_count()).
//
// `is_valid` is mandatory feasibility (an invalid transition is undefined);
// `is_nondominated` is an optional pruning filter that never changes the
// optimal objective. `terminal_adjustment` is an extra reward collected after
// the last stage (e.g. a return-to-depot leg). `completion_bound` must be an
// admissible optimistic bound on the total remaining reward (terminal
// adjustment included) from a state at a given stage. `improvement_step` is
// the smallest meaningful objective improvement (1 for integral objectives).
template <typename P>
concept DpProblem = requires(const P& p, const typename P::State& s, int stage,
                             int value, KeyBuilder& kb) {
  typename P::State;
  { p.n_stages() } -> std::convertible_to<int>;
  { p.action_count() } -> std::convertible_to<int>;
  { p.control_domain(stage) } -> std::convertible_to<std::span<const int>>;
  { p.transition(s, stage, value) } -> std::same_as<typename P::State>;
  { p.reward(s, stage, value) } -> std::convertible_to<double>;
  { p.is_valid(s, stage, value) } -> std::convertible_to<bool>;
  { p.is_nondominated(s, stage, value) } -> std::convertible_to<bool>;
  { p.initial_state() } -> std::same_as<typename P::State>;
  { p.upper_bound() } -> std::convertible_to<double>;
  { p.terminal_adjustment(s) } -> std::convertible_to<double>;
  { p.completion_bound(s, stage) } -> std::convertible_to<double>;
  { p.improvement_step() } -> std::convertible_to<double>;
  { p.write_key(s, kb) };
};

// One episode through a problem. `rewards` holds the per-step rewards without
// the terminal adjustment; `total_return` adds it when the episode completed.
struct EpisodeTrace {
  std::vector<std::pair<int, int>> assignment;  // (stage, value)
  std::vector<double> rewards;
  bool terminated_early = false;
  double total_return = 0.0;
};

template <DpProblem P>
std::string canonical_key(const P& p, const typename P::State& s, int stage) {
  KeyBuilder kb;
  kb.u32(static_cast<std::uint32_t>(stage));
  p.write_key(s, kb);
  return kb.take();
}

// Controls at `stage` that are both valid and non-dominated; may be empty.
template <DpProblem P>
std::vector<int> feasible_controls(const P& p, const typename P::State& s,
                                   int stage) {
  if (stage < 0 || stage >= p.n_stages())
    throw ContractViolation("feasible_controls: stage " +
                            std::to_string(stage) + " out of range");
  std::vector<int> out;
  for (int v : p.control_domain(stage)) {
    if (p.is_valid(s, stage, v) && p.is_nondominated(s, stage, v))
      out.push_back(v);
  }
  return out;
}

template <DpProblem P>
std::pair<typename P::State, double> apply(const P& p,
                                           const typename P::State& s,
                                           int stage, int value) {
  if (stage < 0 || stage >= p.n_stages())
    throw ContractViolation("apply: stage " + std::to_string(stage) +
                            " out of range");
  if (!p.is_valid(s, stage, value) || !p.is_nondominated(s, stage, value))
    throw InvalidTransition(stage, value);
  return {p.transition(s, stage, value), p.reward(s, stage, value)};
}

enum class Dominance { off, on };

struct BellmanResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<int> assignment;  // one control per stage when feasible
  long expanded = 0;            // memo entries created
};

namespace detail {

struct BellmanEntry {
  bool feasible;
  double value;
  int best;  // control value at this state
};

template <DpProblem P>
const BellmanEntry& bellman_rec(
    const P& p, const typename P::State& s, int stage, Dominance dom,
    std::unordered_map<std::string, BellmanEntry>& memo, long& expanded) {
  std::string key = canonical_key(p, s, stage);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  BellmanEntry entry{false, 0.0, -1};
  if (stage == p.n_stages()) {
    entry = {true, p.terminal_adjustment(s), -1};
  } else {
    for (int v : p.control_domain(stage)) {
      if (!p.is_valid(s, stage, v)) continue;
      if (dom == Dominance::on && !p.is_nondominated(s, stage, v)) continue;
      typename P::State next = p.transition(s, stage, v);
      const BellmanEntry& sub =
          bellman_rec(p, next, stage + 1, dom, memo, expanded);
      if (!sub.feasible) continue;
      double total = p.reward(s, stage, v) + sub.value;
      if (!entry.feasible || total > entry.value) entry = {true, total, v};
    }
  }
  ++expanded;
  return memo.emplace(std::move(key), entry).first->second;
}

}  // namespace detail

// Exhaustive memoized recursion; the ground-truth oracle. Dominance is off by
// default so the oracle does not share the pruning logic it is used to check.
template <DpProblem P>
BellmanResult bellman_solve(const P& p, Dominance dom = Dominance::off) {
  std::unordered_map<std::string, detail::BellmanEntry> memo;
  BellmanResult result;
  typename P::State s = p.initial_state();
  const detail::BellmanEntry* entry =
      &detail::bellman_rec(p, s, 0, dom, memo, result.expanded);
  result.feasible = entry->feasible;
  if (!entry->feasible) return result;
  result.value = entry->value;
  for (int stage = 0; stage < p.n_stages(); ++stage) {
    int v = entry->best;
    result.assignment.push_back(v);
    s = p.transition(s, stage, v);
    entry = &memo.at(canonical_key(p, s, stage + 1));
  }
  return result;
}

}  // namespace dpcp
