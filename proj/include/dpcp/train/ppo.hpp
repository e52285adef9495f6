#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
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
#include "dpcp/util/rng.hpp"

namespace dpcp::train {

struct PpoConfig {
  std::int64_t episodes = 1000;
  int horizon = 2048;  // minimum timesteps collected per update
  int batch_size = 64;
  int epochs = 3;
  double lr = 1e-4;
  double clip = 0.1;
  double entropy_coef = 0.001;
  double value_coef = 0.5;
  bool normalize_advantage = true;
  int validation_every = 100;  // in episodes; 0 disables validation
  int validation_instances = 100;
  rl::ShapingConfig shaping;
  std::uint64_t seed = 1;
};

// Undiscounted PPO: collect whole episodes until the horizon fills, use
// shaped returns-to-go as value targets and return-minus-value as the
// advantage, then run a few epochs of clipped-surrogate minibatch updates
// over the batch. The actor and critic share the encoder; their losses are
// combined with the entropy bonus into one objective per minibatch.
template <typename Task>
class PpoTrainer {
 public:
  PpoTrainer(Task task, PpoConfig cfg)
      : task_(std::move(task)),
        cfg_(cfg),
        net_(Task::network(nn::Head::actor_critic), cfg.seed),
        adam_({cfg.lr}) {
    make_validation_set();
  }

  // Continues from saved run state. Collection follows the per-episode seed
  // schedule and update shuffles follow the update counter, so the
  // interruption does not disturb either.
  PpoTrainer(Task task, PpoConfig cfg, const nn::Checkpoint& ckpt)
      : PpoTrainer(std::move(task), cfg) {
    nn::weights_from_json(net_.weights(), ckpt.weights);
    if (!ckpt.adam.is_null()) adam_.restore(net_.weights(), ckpt.adam);
    episodes_done_ = ckpt.episodes;
    if (cfg_.validation_every > 0)
      next_validation_ = episodes_done_ / cfg_.validation_every + 1;
    if (ckpt.metadata.contains("updates"))
      updates_done_ = ckpt.metadata.at("updates").get<std::int64_t>();
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
  std::int64_t updates_done() const { return updates_done_; }
  double last_loss() const { return last_loss_; }
  const std::vector<ValidationPoint>& validation() const { return validation_; }
  std::int64_t best_episode() const { return best_episode_; }

  void run() {
    while (episodes_done_ < cfg_.episodes) iterate();
  }

  // One collect-update cycle. Collection is episode-granular, so validation
  // runs after the first update that crosses each validation_every mark.
  void iterate() {
    collect();
    update();
    if (cfg_.validation_every > 0 &&
        episodes_done_ >= next_validation_ * cfg_.validation_every) {
      validate();
      next_validation_ = episodes_done_ / cfg_.validation_every + 1;
    }
  }

  // Greedy rollout under the current actor; ties take the lowest action id.
  rl::Rollout greedy(const typename Task::Instance& inst) const {
    typename Task::Problem p = Task::problem(inst);
    return greedy_decode(
        p,
        [&](const typename Task::Problem::State& s, int stage,
            std::span<const int> feas) {
          nn::NetInput in = Task::net_input(inst, s, stage);
          std::vector<bool> mask = rl::action_mask(p, s, stage);
          std::vector<double> probs = net_.policy(in, mask, 1.0);
          std::vector<double> sc(feas.size());
          for (int i = 0; i < static_cast<int>(feas.size()); ++i)
            sc[i] = probs[feas[i]];
          return sc;
        },
        cfg_.shaping);
  }

  // Beam decode under the current actor's log-probabilities.
  BeamResult beam(const typename Task::Instance& inst, int width) const {
    typename Task::Problem p = Task::problem(inst);
    return beam_decode(
        p,
        [&](const typename Task::Problem::State& s, int stage,
            std::span<const int> feas) {
          nn::NetInput in = Task::net_input(inst, s, stage);
          std::vector<bool> mask = rl::action_mask(p, s, stage);
          std::vector<double> probs = net_.policy(in, mask, 1.0);
          std::vector<double> lp(feas.size());
          for (int i = 0; i < static_cast<int>(feas.size()); ++i)
            lp[i] = std::log(probs[feas[i]]);
          return lp;
        },
        width);
  }

  nn::Checkpoint checkpoint() const {
    nn::Checkpoint c = base_checkpoint();
    c.episodes = episodes_done_;
    c.metadata["updates"] = updates_done_;
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
  struct Step {
    nn::NetInput input;
    std::vector<bool> mask;
    int action = 0;
    double logp_old = 0.0;
    double ret = 0.0;  // shaped return-to-go
    double adv = 0.0;
  };

  nn::Checkpoint base_checkpoint() const {
    nn::Checkpoint c;
    c.kind = "ppo";
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

  void collect() {
    batch_.clear();
    while (static_cast<int>(batch_.size()) < cfg_.horizon &&
           episodes_done_ < cfg_.episodes) {
      std::uint64_t es = derive_seed(
          cfg_.seed,
          kEpisodeStream + static_cast<std::uint64_t>(episodes_done_));
      typename Task::Instance inst = task_.make(derive_seed(es, 0));
      typename Task::Problem p = Task::problem(inst);
      Rng explore(derive_seed(es, 1));
      rl::Env<typename Task::Problem> env(p, cfg_.shaping);
      std::vector<Step> steps;
      std::vector<double> shaped;
      std::vector<double> values;
      while (!env.done()) {
        nn::NetInput in = Task::net_input(inst, env.state(), env.stage());
        std::vector<bool> mask = env.mask();
        std::vector<double> probs = net_.policy(in, mask, 1.0);
        int a = sample_index(probs, explore);
        values.push_back(net_.value_estimate(in));
        rl::StepOutcome out = env.step(a);
        steps.push_back(
            {std::move(in), std::move(mask), a, std::log(probs[a]), 0.0, 0.0});
        shaped.push_back(out.shaped);
      }
      std::vector<double> rets = returns_to_go(shaped);
      for (int i = 0; i < static_cast<int>(steps.size()); ++i) {
        steps[i].ret = rets[i];
        steps[i].adv = rets[i] - values[i];
        batch_.push_back(std::move(steps[i]));
      }
      ++episodes_done_;
    }
  }

  void update() {
    if (batch_.empty()) return;
    if (cfg_.normalize_advantage && batch_.size() > 1) {
      double mean = 0.0;
      for (const Step& s : batch_) mean += s.adv;
      mean /= static_cast<double>(batch_.size());
      double var = 0.0;
      for (const Step& s : batch_) var += (s.adv - mean) * (s.adv - mean);
      double sd = std::sqrt(var / static_cast<double>(batch_.size()));
      for (Step& s : batch_) s.adv = (s.adv - mean) / (sd + 1e-8);
    }
    Rng shuffler(derive_seed(
        cfg_.seed, kUpdateStream + static_cast<std::uint64_t>(updates_done_)));
    std::vector<int> order(batch_.size());
    std::iota(order.begin(), order.end(), 0);
    for (int ep = 0; ep < cfg_.epochs; ++ep) {
      shuffler.shuffle(order);
      for (std::size_t ofs = 0; ofs < order.size();
           ofs += static_cast<std::size_t>(cfg_.batch_size)) {
        std::size_t len = std::min(static_cast<std::size_t>(cfg_.batch_size),
                                   order.size() - ofs);
        minibatch(std::span<const int>(order).subspan(ofs, len));
      }
    }
    ++updates_done_;
    batch_.clear();
  }

  void minibatch(std::span<const int> idx) {
    nn::Tape t;
    std::vector<nn::Tape::Id> surr, vloss, ent;
    for (int i : idx) {
      const Step& s = batch_[i];
      nn::Network::ActorCritic ac = net_.actor_critic(t, s.input);
      nn::Tape::Id probs = t.masked_softmax_row(ac.logits, s.mask);
      nn::Tape::Id logp = t.log_(t.pick(probs, 0, s.action));
      nn::Tape::Id ratio = t.exp_(t.addc(logp, -s.logp_old));
      nn::Tape::Id clipped = t.clamp(ratio, 1.0 - cfg_.clip, 1.0 + cfg_.clip);
      surr.push_back(t.min2(t.scale(ratio, s.adv), t.scale(clipped, s.adv)));
      vloss.push_back(t.square(t.addc(ac.value, -s.ret)));
      ent.push_back(t.entropy_row(probs, s.mask));
    }
    double inv = 1.0 / static_cast<double>(idx.size());
    nn::Tape::Id loss =
        t.add(t.scale(t.sum(t.stack_scalars(surr)), -inv),
              t.add(t.scale(t.sum(t.stack_scalars(vloss)),
                            cfg_.value_coef * inv),
                    t.scale(t.sum(t.stack_scalars(ent)),
                            -cfg_.entropy_coef * inv)));
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
    if (best_episode_ < 0 || vp.average_return > best_average_) {
      best_episode_ = vp.episode;
      best_average_ = vp.average_return;
      best_weights_ = nn::weights_to_json(net_.weights());
    }
  }

  Task task_;
  PpoConfig cfg_;
  nn::Network net_;
  nn::Adam adam_;
  std::vector<typename Task::Instance> validation_set_;
  std::vector<Step> batch_;
  std::vector<ValidationPoint> validation_;
  std::int64_t episodes_done_ = 0;
  std::int64_t updates_done_ = 0;
  std::int64_t next_validation_ = 1;
  std::int64_t best_episode_ = -1;
  double best_average_ = 0.0;
  nlohmann::ordered_json best_weights_;
  double last_loss_ = 0.0;
};

}  // namespace dpcp::train
