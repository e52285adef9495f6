#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dpcp/nn/adam.hpp"
#include "dpcp/nn/checkpoint.hpp"
#include "dpcp/nn/network.hpp"
#include "dpcp/nn/tape.hpp"
#include "dpcp/rl/env.hpp"
#include "dpcp/train/common.hpp"
#include "dpcp/train/decode.hpp"
#include "dpcp/train/replay.hpp"
#include "dpcp/util/rng.hpp"

namespace dpcp::train {

struct DqnConfig {
  std::int64_t episodes = 1000;
  int batch_size = 32;
  double lr = 1e-4;
  double temperature = 10.0;  // Boltzmann exploration over Q values
  int replay_capacity = 10000;
  int updates_per_episode = 4;
  int validation_every = 100;  // in episodes; 0 disables validation
  int validation_instances = 100;
  rl::ShapingConfig shaping;
  std::uint64_t seed = 1;
};

// Q regression against Monte-Carlo returns: play an episode with Boltzmann
// exploration, store every (state, action, shaped return-to-go) in the
// replay buffer, then fit sampled minibatches by squared error. Greedy
// action = argmax Q, so once the shaped returns separate feasible
// continuations from dead ends the greedy policy steers toward complete
// episodes first and shorter ones second.
template <typename Task>
class DqnTrainer {
 public:
  DqnTrainer(Task task, DqnConfig cfg)
      : task_(std::move(task)),
        cfg_(cfg),
        net_(Task::network(nn::Head::q), cfg.seed),
        adam_({cfg.lr}),
        replay_(cfg.replay_capacity) {
    make_validation_set();
  }

  // Continues from saved run state. The replay buffer restarts empty;
  // instance draws and exploration follow the per-episode seed schedule, so
  // the interruption does not disturb them.
  DqnTrainer(Task task, DqnConfig cfg, const nn::Checkpoint& ckpt)
      : DqnTrainer(std::move(task), cfg) {
    nn::weights_from_json(net_.weights(), ckpt.weights);
    if (!ckpt.adam.is_null()) adam_.restore(net_.weights(), ckpt.adam);
    episodes_done_ = ckpt.episodes;
    if (ckpt.metadata.contains("best")) {
      const auto& b = ckpt.metadata.at("best");
      best_episode_ = b.at("episode").get<std::int64_t>();
      best_average_ = b.at("average").get<double>();
      best_weights_ = b.at("weights");
    }
  }

  const nn::Network& network() const { return net_; }
  nn::Network& network() { return net_; }
  std::int64_t episodes_done() const { return episodes_done_; }
  double last_loss() const { return last_loss_; }
  const std::vector<ValidationPoint>& validation() const { return validation_; }
  std::int64_t best_episode() const { return best_episode_; }
  double best_average() const { return best_average_; }
  // Shaped return of every exploration episode this process ran, in order.
  const std::vector<double>& episode_returns() const { return episode_returns_; }
  const std::vector<typename Task::Instance>& validation_set() const {
    return validation_set_;
  }

  void run() {
    while (episodes_done_ < cfg_.episodes) train_episode();
  }

  void train_episode() {
    std::uint64_t es = derive_seed(
        cfg_.seed, kEpisodeStream + static_cast<std::uint64_t>(episodes_done_));
    typename Task::Instance inst = task_.make(derive_seed(es, 0));
    typename Task::Problem p = Task::problem(inst);
    Rng explore(derive_seed(es, 1));
    rl::Env<typename Task::Problem> env(p, cfg_.shaping);
    std::vector<Transition> steps;
    std::vector<double> shaped;
    while (!env.done()) {
      nn::NetInput in = Task::net_input(inst, env.state(), env.stage());
      std::vector<double> probs = net_.policy(in, env.mask(), cfg_.temperature);
      int a = sample_index(probs, explore);
      rl::StepOutcome out = env.step(a);
      steps.push_back({std::move(in), a, 0.0});
      shaped.push_back(out.shaped);
    }
    std::vector<double> targets = returns_to_go(shaped);
    for (int i = 0; i < static_cast<int>(steps.size()); ++i) {
      steps[i].target = targets[i];
      replay_.push(std::move(steps[i]));
    }
    episode_returns_.push_back(env.shaped_return());
    ++episodes_done_;
    if (replay_.size() >= cfg_.batch_size) {
      Rng sampler(derive_seed(es, 2));
      for (int u = 0; u < cfg_.updates_per_episode; ++u) update(sampler);
    }
    if (cfg_.validation_every > 0 &&
        episodes_done_ % cfg_.validation_every == 0)
      validate();
  }

  // Greedy rollout under the current Q function; ties take the lowest
  // action id.
  rl::Rollout greedy(const typename Task::Instance& inst) const {
    typename Task::Problem p = Task::problem(inst);
    return greedy_decode(
        p,
        [&](const typename Task::Problem::State& s, int stage,
            std::span<const int> feas) {
          std::vector<double> q =
              net_.q_values(Task::net_input(inst, s, stage));
          std::vector<double> sc(feas.size());
          for (int i = 0; i < static_cast<int>(feas.size()); ++i)
            sc[i] = q[feas[i]];
          return sc;
        },
        cfg_.shaping);
  }

  // Full run state: current weights plus optimizer moments, for resuming.
  nn::Checkpoint checkpoint() const {
    nn::Checkpoint c = base_checkpoint();
    c.episodes = episodes_done_;
    c.weights = nn::weights_to_json(net_.weights());
    c.adam = adam_.to_json();
    if (best_episode_ >= 0) {
      nlohmann::ordered_json b;
      b["episode"] = best_episode_;
      b["average"] = best_average_;
      b["weights"] = best_weights_;
      c.metadata["best"] = std::move(b);
    }
    return c;
  }

  // Solving artifact: the weights with the best validation average so far,
  // or the current ones when validation never ran.
  nn::Checkpoint best_checkpoint() const {
    nn::Checkpoint c = base_checkpoint();
    if (best_episode_ >= 0) {
      c.episodes = best_episode_;
      c.weights = best_weights_;
      c.metadata["validation_average"] = best_average_;
    } else {
      c.episodes = episodes_done_;
      c.weights = nn::weights_to_json(net_.weights());
    }
    return c;
  }

 private:
  nn::Checkpoint base_checkpoint() const {
    nn::Checkpoint c;
    c.kind = "dqn";
    c.problem = Task::name();
    c.config = net_.config();
    c.seed = cfg_.seed;
    return c;
  }

  void make_validation_set() {
    for (int i = 0; i < cfg_.validation_instances; ++i)
      validation_set_.push_back(task_.make(
          derive_seed(cfg_.seed, kValidationStream + static_cast<std::uint64_t>(i))));
  }

  void update(Rng& rng) {
    std::vector<int> idx = replay_.sample(cfg_.batch_size, rng);
    nn::Tape t;
    std::vector<nn::Tape::Id> errs;
    for (int i : idx) {
      const Transition& tr = replay_.at(i);
      nn::Tape::Id q = t.pick(net_.q_row(t, tr.input), 0, tr.action);
      errs.push_back(t.square(t.addc(q, -tr.target)));
    }
    nn::Tape::Id loss =
        t.scale(t.sum(t.stack_scalars(errs)), 1.0 / cfg_.batch_size);
    last_loss_ = t.value(loss).a[0];
    t.backward(loss);
    adam_.step(net_.weights());
  }

  void validate() {
    double total = 0.0;
    int complete = 0;
    for (const typename Task::Instance& inst : validation_set_) {
      rl::Rollout r = greedy(inst);
      total += r.shaped_return;
      complete += r.complete ? 1 : 0;
    }
    ValidationPoint vp{episodes_done_,
                      total / static_cast<double>(validation_set_.size()),
                      complete};
    validation_.push_back(vp);
    // Strict improvement keeps the earliest best on ties.
    if (best_episode_ < 0 || vp.average_return > best_average_) {
      best_episode_ = vp.episode;
      best_average_ = vp.average_return;
      best_weights_ = nn::weights_to_json(net_.weights());
    }
  }

  Task task_;
  DqnConfig cfg_;
  nn::Network net_;
  nn::Adam adam_;
  Replay replay_;
  std::vector<typename Task::Instance> validation_set_;
  std::vector<ValidationPoint> validation_;
  std::vector<double> episode_returns_;
  std::int64_t episodes_done_ = 0;
  std::int64_t best_episode_ = -1;
  double best_average_ = 0.0;
  nlohmann::ordered_json best_weights_;
  double last_loss_ = 0.0;
};

}  // namespace dpcp::train
