#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dpcp/cp/cache.hpp"
#include "dpcp/dp/problem.hpp"
#include "dpcp/nn/network.hpp"
#include "dpcp/nn/tape.hpp"
#include "dpcp/problems/tsptw.hpp"

namespace dpcp::cp {

// Branching scorers: given a state and the candidate values at its stage,
// return one score per candidate; searches try higher scores first and
// break ties toward the lower value.

// Ascending value order.
struct LexScorer {
  template <typename State>
  std::vector<double> operator()(const State&, int,
                                 std::span<const int> values) const {
    std::vector<double> sc(values.size());
    for (int i = 0; i < static_cast<int>(values.size()); ++i)
      sc[i] = -values[i];
    return sc;
  }
};

// Closest customer first.
struct NearestScorer {
  const tsptw::Instance* inst;

  std::vector<double> operator()(const tsptw::State& s, int,
                                 std::span<const int> values) const {
    std::vector<double> sc(values.size());
    for (int i = 0; i < static_cast<int>(values.size()); ++i)
      sc[i] = -static_cast<double>(inst->dist[s.last][values[i]]);
    return sc;
  }
};

// Scores candidates with the network's prediction row for the state: Q
// values for a q head, actor logits otherwise. With a cache attached,
// repeated states reuse the stored row; `evals` (when set) counts actual
// network forward passes.
template <typename Task>
struct NetScorer {
  const typename Task::Problem* p;
  const typename Task::Instance* inst;
  const nn::Network* net;
  PredictionCache* cache = nullptr;
  std::int64_t* evals = nullptr;

  std::vector<double> operator()(const typename Task::Problem::State& s,
                                 int stage, std::span<const int> values) {
    auto compute = [&] {
      if (evals) ++(*evals);
      nn::NetInput in = Task::net_input(*inst, s, stage);
      nn::Tape t;
      nn::Tape::Id row = net->config().head == nn::Head::q
                             ? net->q_row(t, in)
                             : net->actor_logits(t, in);
      return t.value(row).a;
    };
    std::vector<double> row_copy;
    const std::vector<double>* row;
    if (cache) {
      row = &cache->get(canonical_key(*p, s, stage), compute);
    } else {
      row_copy = compute();
      row = &row_copy;
    }
    std::vector<double> sc(values.size());
    for (int i = 0; i < static_cast<int>(values.size()); ++i)
      sc[i] = (*row)[values[i]];
    return sc;
  }
};

}  // namespace dpcp::cp
