#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dpcp/dp/problem.hpp"

namespace dpcp::rl {

// Per-step reward shaping. With the feasibility bonus on, every completed
// step earns rho * (1 + |UB| + r); the large constant makes any longer
// episode outrank any shorter one, so infeasible (dead-ended) episodes sort
// strictly below complete ones and complete episodes sort by raw objective.
// With the bonus off the shaped reward is just rho * r, for problems where
// every episode runs to completion anyway.
struct ShapingConfig {
  double rho = 1.0;
  bool feasibility_bonus = false;
};

template <DpProblem P>
double shaped_reward(const P& p, double raw, const ShapingConfig& cfg) {
  if (!cfg.feasibility_bonus) return cfg.rho * raw;
  return cfg.rho * (1.0 + std::abs(p.upper_bound()) + raw);
}

// Feasibility mask over action ids [0, action_count); ids outside the
// stage's control domain stay false.
template <DpProblem P>
std::vector<bool> action_mask(const P& p, const typename P::State& s,
                              int stage) {
  std::vector<bool> mask(p.action_count(), false);
  for (int v : feasible_controls(p, s, stage)) mask[v] = true;
  return mask;
}

struct StepOutcome {
  double raw = 0.0;     // problem reward; the last step folds in the
                        // terminal adjustment
  double shaped = 0.0;
  bool done = false;
  bool complete = false;
};

// Sequential episode over a problem. An episode ends either after the last
// stage (complete) or early at a state with no feasible control (dead end).
template <DpProblem P>
class Env {
 public:
  Env(const P& p, ShapingConfig cfg) : p_(&p), cfg_(cfg) { reset(); }

  const typename P::State& state() const { return state_; }
  int stage() const { return stage_; }
  bool done() const { return done_; }
  bool complete() const { return complete_; }
  double raw_return() const { return raw_return_; }
  double shaped_return() const { return shaped_return_; }
  const ShapingConfig& shaping() const { return cfg_; }

  const typename P::State& reset() {
    state_ = p_->initial_state();
    stage_ = 0;
    raw_return_ = 0.0;
    shaped_return_ = 0.0;
    complete_ = false;
    done_ = p_->n_stages() == 0;
    if (done_) {
      complete_ = true;
      raw_return_ = p_->terminal_adjustment(state_);
      shaped_return_ = shaped_reward(*p_, raw_return_, cfg_);
    } else {
      refresh_dead_end();
    }
    return state_;
  }

  std::vector<bool> mask() const {
    if (done_) return std::vector<bool>(p_->action_count(), false);
    return action_mask(*p_, state_, stage_);
  }

  StepOutcome step(int value) {
    if (done_) throw ContractViolation("step on finished episode");
    auto [next, r] = apply(*p_, state_, stage_, value);
    state_ = next;
    ++stage_;
    StepOutcome out;
    out.raw = r;
    if (stage_ == p_->n_stages()) {
      out.raw += p_->terminal_adjustment(state_);
      done_ = true;
      complete_ = true;
    }
    out.shaped = shaped_reward(*p_, out.raw, cfg_);
    raw_return_ += out.raw;
    shaped_return_ += out.shaped;
    if (!done_) refresh_dead_end();
    out.done = done_;
    out.complete = complete_;
    return out;
  }

 private:
  void refresh_dead_end() {
    if (feasible_controls(*p_, state_, stage_).empty()) done_ = true;
  }

  const P* p_;
  ShapingConfig cfg_;
  typename P::State state_{};
  int stage_ = 0;
  double raw_return_ = 0.0;
  double shaped_return_ = 0.0;
  bool done_ = false;
  bool complete_ = false;
};

struct StepRecord {
  int stage = 0;
  int value = 0;
  double raw = 0.0;
  double shaped = 0.0;
};

struct Rollout {
  std::vector<StepRecord> steps;
  bool complete = false;
  double raw_return = 0.0;
  double shaped_return = 0.0;
};

// Runs one episode with `pick(state, stage, feasible) -> control value`.
template <DpProblem P, typename Pick>
Rollout rollout(const P& p, Pick&& pick, const ShapingConfig& cfg) {
  Env<P> env(p, cfg);
  Rollout out;
  while (!env.done()) {
    auto feasible = feasible_controls(p, env.state(), env.stage());
    int stage = env.stage();
    int value = pick(env.state(), stage, feasible);
    auto step = env.step(value);
    out.steps.push_back({stage, value, step.raw, step.shaped});
  }
  out.complete = env.complete();
  out.raw_return = env.raw_return();
  out.shaped_return = env.shaped_return();
  return out;
}

}  // namespace dpcp::rl
