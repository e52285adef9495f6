#pragma once

#include <cstdint>

#include "dpcp/nn/network.hpp"
#include "dpcp/problems/portfolio.hpp"
#include "dpcp/problems/tsptw.hpp"
#include "dpcp/rl/env.hpp"

namespace dpcp::train {

// A task ties a problem family to the network that scores its actions:
// how to draw a training instance, how to turn a search state into a
// network input, and which encoder / action head the network needs. The
// action id fed to Env::step doubles as the index into the network's
// output row for both tasks, so no extra mapping is needed.

struct TsptwTask {
  using Instance = tsptw::Instance;
  using Problem = tsptw::Dp;

  int n = 20;
  int window_width = 100;
  int gap = 10;

  static const char* name() { return "tsptw"; }

  Instance make(std::uint64_t seed) const {
    return tsptw::generate(n, seed, window_width, gap);
  }

  static Problem problem(const Instance& inst) { return Problem(inst); }

  static nn::NetInput net_input(const Instance& inst,
                                const tsptw::State& s, int /*stage*/) {
    tsptw::Features f = tsptw::features(inst, s);
    nn::NetInput in;
    in.nodes = nn::Mat(inst.n, 6);
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < 6; ++j) in.nodes.at(i, j) = f.nodes[i][j];
    in.edges = nn::Mat(inst.n, inst.n);
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < inst.n; ++j) in.edges.at(i, j) = f.edges[i][j];
    return in;
  }

  static nn::NetworkConfig network(nn::Head head) {
    nn::NetworkConfig cfg;
    cfg.encoder = nn::Encoder::graph;
    cfg.head = head;
    cfg.action_head = nn::ActionHead::per_item;
    cfg.feature_dim = 6;
    return cfg;
  }

  // Infeasible episodes exist, so completed ones must outrank them.
  static rl::ShapingConfig default_shaping() { return {0.001, true}; }
};

struct PortTask {
  using Instance = port::Instance;
  using Problem = port::Dp;

  int n = 20;
  port::Mode mode = port::Mode::continuous;

  static const char* name() { return "port"; }

  Instance make(std::uint64_t seed) const {
    return port::generate(n, seed, mode);
  }

  static Problem problem(const Instance& inst) { return Problem(inst); }

  static nn::NetInput net_input(const Instance& inst, const port::State& s,
                                int stage) {
    port::Features f = port::features(inst, s, stage);
    nn::NetInput in;
    in.nodes = nn::Mat(inst.n, 9);
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < 9; ++j) in.nodes.at(i, j) = f.items[i][j];
    in.current = f.current;
    return in;
  }

  static nn::NetworkConfig network(nn::Head head) {
    nn::NetworkConfig cfg;
    cfg.encoder = nn::Encoder::set;
    cfg.head = head;
    cfg.action_head = nn::ActionHead::binary;
    cfg.feature_dim = 9;
    return cfg;
  }

  // Every item can always be skipped, so no episode dead-ends.
  static rl::ShapingConfig default_shaping() { return {1.0, false}; }
};

}  // namespace dpcp::train
