#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpcp/nn/params.hpp"
#include "dpcp/nn/tape.hpp"
#include "dpcp/util/rng.hpp"

namespace dpcp::nn {

enum class Encoder { graph, set };
enum class Head { q, actor_critic };
enum class ActionHead { per_item, binary };

struct NetworkConfig {
  Encoder encoder = Encoder::graph;
  Head head = Head::q;
  ActionHead action_head = ActionHead::per_item;
  int feature_dim = 6;    // raw per-node features
  int embedding_dim = 16;
  int layers = 4;
  int head_hidden = 32;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["encoder"] = encoder == Encoder::graph ? "graph" : "set";
    j["head"] = head == Head::q ? "q" : "actor_critic";
    j["action_head"] = action_head == ActionHead::per_item ? "per_item" : "binary";
    j["feature_dim"] = feature_dim;
    j["embedding_dim"] = embedding_dim;
    j["layers"] = layers;
    j["head_hidden"] = head_hidden;
    return j;
  }

  static NetworkConfig from_json(const nlohmann::ordered_json& j) {
    NetworkConfig c;
    std::string enc = j.at("encoder").get<std::string>();
    if (enc == "graph") c.encoder = Encoder::graph;
    else if (enc == "set") c.encoder = Encoder::set;
    else throw std::invalid_argument("unknown encoder: " + enc);
    std::string head = j.at("head").get<std::string>();
    if (head == "q") c.head = Head::q;
    else if (head == "actor_critic") c.head = Head::actor_critic;
    else throw std::invalid_argument("unknown head: " + head);
    std::string ah = j.at("action_head").get<std::string>();
    if (ah == "per_item") c.action_head = ActionHead::per_item;
    else if (ah == "binary") c.action_head = ActionHead::binary;
    else throw std::invalid_argument("unknown action head: " + ah);
    c.feature_dim = j.at("feature_dim").get<int>();
    c.embedding_dim = j.at("embedding_dim").get<int>();
    c.layers = j.at("layers").get<int>();
    c.head_hidden = j.at("head_hidden").get<int>();
    return c;
  }
};

// Everything a forward pass consumes. `edges` is ignored by the set encoder;
// `current` selects the item the binary action head decides about.
struct NetInput {
  Mat nodes;  // n x feature_dim
  Mat edges;  // n x n pairwise weights (graph encoder only)
  int current = 0;
};

// Attention encoder over node features plus one or two small MLP heads.
// Layer: S = (H Wq)(H Wk)^T / sqrt(D) (+ we * E for the graph encoder),
// A = row-softmax(S), H' = tanh(H Wo + A (H Wv) + b). All activations are
// tanh so the whole network is smooth, which keeps finite-difference
// gradient checks clean.
class Network {
 public:
  Network(NetworkConfig cfg, std::uint64_t seed) : cfg_(cfg) {
    Rng rng(seed);
    const int F = cfg.feature_dim, D = cfg.embedding_dim;
    init(w_.add("enc.in.W", F, D), rng);
    w_.add("enc.in.b", 1, D);
    for (int l = 0; l < cfg.layers; ++l) {
      std::string p = "enc.l" + std::to_string(l) + ".";
      init(w_.add(p + "Wq", D, D), rng);
      init(w_.add(p + "Wk", D, D), rng);
      init(w_.add(p + "Wv", D, D), rng);
      init(w_.add(p + "Wo", D, D), rng);
      w_.add(p + "b", 1, D);
      if (cfg.encoder == Encoder::graph) init(w_.add(p + "we", 1, 1), rng);
    }
    if (cfg.head == Head::q) {
      add_head("q", rng);
    } else {
      add_head("actor", rng);
      init(w_.add("critic.h1.W", D, cfg.head_hidden), rng);
      w_.add("critic.h1.b", 1, cfg.head_hidden);
      init(w_.add("critic.h2.W", cfg.head_hidden, 1), rng);
      w_.add("critic.h2.b", 1, 1);
    }
  }

  const NetworkConfig& config() const { return cfg_; }
  Weights& weights() { return w_; }
  const Weights& weights() const { return w_; }

  // n x D node embeddings.
  Tape::Id embed(Tape& t, const NetInput& in) const {
    const int D = cfg_.embedding_dim;
    if (in.nodes.cols != cfg_.feature_dim)
      throw std::invalid_argument("embed: feature dim mismatch");
    Tape::Id h = t.tanh_(t.add_rowvec(
        t.matmul(t.constant(in.nodes), t.param(w("enc.in.W"))),
        t.param(w("enc.in.b"))));
    Tape::Id edges = -1;
    if (cfg_.encoder == Encoder::graph) {
      if (in.edges.rows != in.nodes.rows || in.edges.cols != in.nodes.rows)
        throw std::invalid_argument("embed: edge matrix shape");
      edges = t.constant(in.edges);
    }
    for (int l = 0; l < cfg_.layers; ++l) {
      std::string p = "enc.l" + std::to_string(l) + ".";
      Tape::Id q = t.matmul(h, t.param(w(p + "Wq")));
      Tape::Id k = t.matmul(h, t.param(w(p + "Wk")));
      Tape::Id scores = t.scale(t.matmul_nt(q, k), 1.0 / std::sqrt(D));
      if (cfg_.encoder == Encoder::graph)
        scores = t.add(scores, t.scale_node(edges, t.param(w(p + "we"))));
      Tape::Id attn = t.softmax_rows(scores);
      Tape::Id mixed = t.matmul(attn, t.matmul(h, t.param(w(p + "Wv"))));
      h = t.tanh_(t.add_rowvec(
          t.add(t.matmul(h, t.param(w(p + "Wo"))), mixed),
          t.param(w(p + "b"))));
    }
    return h;
  }

  // 1 x A action scores from the Q head.
  Tape::Id q_row(Tape& t, const NetInput& in) const {
    if (cfg_.head != Head::q)
      throw std::invalid_argument("q_row: network has no q head");
    return head_row(t, in, "q", embed(t, in));
  }

  // 1 x A action logits from the actor head.
  Tape::Id actor_logits(Tape& t, const NetInput& in) const {
    if (cfg_.head != Head::actor_critic)
      throw std::invalid_argument("actor_logits: network has no actor head");
    return head_row(t, in, "actor", embed(t, in));
  }

  // 1 x 1 state value from the critic (max-pooled embedding).
  Tape::Id critic_value(Tape& t, const NetInput& in) const {
    if (cfg_.head != Head::actor_critic)
      throw std::invalid_argument("critic_value: network has no critic");
    return critic_from(t, embed(t, in));
  }

  struct ActorCritic {
    Tape::Id logits;
    Tape::Id value;
  };

  // Both heads over one shared embedding pass.
  ActorCritic actor_critic(Tape& t, const NetInput& in) const {
    if (cfg_.head != Head::actor_critic)
      throw std::invalid_argument("actor_critic: wrong head");
    Tape::Id h = embed(t, in);
    return {head_row(t, in, "actor", h), critic_from(t, h)};
  }

  std::vector<double> q_values(const NetInput& in) const {
    Tape t;
    return t.value(q_row(t, in)).a;
  }

  // Masked Boltzmann policy over action scores.
  std::vector<double> policy(const NetInput& in, const std::vector<bool>& mask,
                             double temp) const {
    Tape t;
    Tape::Id row = cfg_.head == Head::q ? q_row(t, in) : actor_logits(t, in);
    return t.value(t.masked_softmax_row(row, mask, temp)).a;
  }

  double value_estimate(const NetInput& in) const {
    Tape t;
    return t.value(critic_value(t, in)).a[0];
  }

 private:
  // Tape::param binds a mutable tensor (backward writes its grad); forward
  // evaluation itself never mutates values, so const methods cast it away.
  Tensor& w(const std::string& name) const {
    return const_cast<Weights&>(w_).at(name);
  }

  void add_head(const std::string& prefix, Rng& rng) {
    const int D = cfg_.embedding_dim;
    init(w_.add(prefix + ".h1.W", 2 * D, cfg_.head_hidden), rng);
    w_.add(prefix + ".h1.b", 1, cfg_.head_hidden);
    int out = cfg_.action_head == ActionHead::binary ? 2 : 1;
    init(w_.add(prefix + ".h2.W", cfg_.head_hidden, out), rng);
    w_.add(prefix + ".h2.b", 1, out);
  }

  Tape::Id critic_from(Tape& t, Tape::Id h) const {
    Tape::Id pool = t.max_pool_rows(h);
    Tape::Id hid = t.tanh_(t.add_rowvec(
        t.matmul(pool, t.param(w("critic.h1.W"))), t.param(w("critic.h1.b"))));
    return t.add_rowvec(t.matmul(hid, t.param(w("critic.h2.W"))),
                        t.param(w("critic.h2.b")));
  }

  Tape::Id head_row(Tape& t, const NetInput& in, const std::string& prefix,
                    Tape::Id h) const {
    Tape::Id pool = t.max_pool_rows(h);
    auto mlp = [&](Tape::Id x) {
      Tape::Id hid = t.tanh_(t.add_rowvec(
          t.matmul(x, t.param(w(prefix + ".h1.W"))),
          t.param(w(prefix + ".h1.b"))));
      return t.add_rowvec(t.matmul(hid, t.param(w(prefix + ".h2.W"))),
                          t.param(w(prefix + ".h2.b")));
    };
    if (cfg_.action_head == ActionHead::binary) {
      if (in.current < 0 || in.current >= in.nodes.rows)
        throw std::invalid_argument("head_row: current item out of range");
      return mlp(t.concat_cols(pool, t.gather_row(h, in.current)));
    }
    std::vector<Tape::Id> scores;
    for (int i = 0; i < in.nodes.rows; ++i)
      scores.push_back(mlp(t.concat_cols(t.gather_row(h, i), pool)));
    return t.stack_scalars(scores);
  }

  static void init(Tensor& t, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(t.value.rows));
    for (double& v : t.value.a) v = rng.uniform_real(-bound, bound);
  }

  NetworkConfig cfg_;
  Weights w_;
};

}  // namespace dpcp::nn
