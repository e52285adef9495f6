#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "dpcp/cp/luby.hpp"
#include "dpcp/cp/model.hpp"
#include "dpcp/dp/problem.hpp"
#include "dpcp/util/rng.hpp"

namespace dpcp::cp {

struct SearchLimits {
  double deadline_s = std::numeric_limits<double>::infinity();
  std::int64_t node_limit = -1;  // -1 = unlimited
};

struct SearchStats {
  std::int64_t nodes = 0;     // search tree vertices visited, leaves included
  std::int64_t failures = 0;  // empty pruned domains plus non-improving leaves
  std::int64_t heuristic_evals = 0;
  std::int64_t cache_hits = 0;
  std::int64_t cache_misses = 0;
  bool completed = false;  // exhausted the tree, i.e. the result is proven
  double wall_s = 0.0;
};

struct IncumbentEvent {
  double objective = 0.0;
  std::int64_t nodes = 0;
  double wall_s = 0.0;
};

struct SearchResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<int> assignment;
  bool proven_optimal = false;
  SearchStats stats;
  std::vector<IncumbentEvent> incumbent_trace;
};

namespace detail {

// Candidates sorted by score descending, ties toward the lower value.
inline std::vector<int> order_desc(std::span<const int> values,
                                   const std::vector<double>& sc) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (sc[a] != sc[b]) return sc[a] > sc[b];
    return values[a] < values[b];
  });
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = values[idx[i]];
  return out;
}

// Boltzmann sampling without replacement at temperature tau; tau <= 0
// degenerates to the deterministic descending order.
inline std::vector<int> boltzmann_order(std::span<const int> values,
                                        const std::vector<double>& sc,
                                        double tau, Rng& rng) {
  if (tau <= 0.0) return order_desc(values, sc);
  double hi = *std::max_element(sc.begin(), sc.end());
  std::vector<double> w(sc.size());
  for (std::size_t i = 0; i < sc.size(); ++i)
    w[i] = std::exp((sc[i] - hi) / tau);
  std::vector<int> remaining(values.begin(), values.end());
  std::vector<int> out;
  while (!remaining.empty()) {
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    double r = rng.real01() * total;
    std::size_t pick = remaining.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      acc += w[i];
      if (r < acc) {
        pick = i;
        break;
      }
    }
    out.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + pick);
    w.erase(w.begin() + pick);
  }
  return out;
}

template <DpProblem P>
struct Ctx {
  const P& p;
  const CpModel<P>& model;
  SearchLimits limits;
  SearchResult res;
  std::vector<int> path;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  bool stopped = false;  // deadline or node limit hit; proof is off

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }

  // Checked at every node entry.
  bool enter_node() {
    if (stopped) return false;
    if (limits.node_limit >= 0 && res.stats.nodes >= limits.node_limit) {
      stopped = true;
      return false;
    }
    if (elapsed() > limits.deadline_s) {
      stopped = true;
      return false;
    }
    ++res.stats.nodes;
    return true;
  }

  double cut() const {
    return res.feasible ? res.objective
                        : -std::numeric_limits<double>::infinity();
  }

  // Complete assignment reached; returns true when it improved.
  bool leaf(double total) {
    if (!res.feasible || total > res.objective) {
      res.feasible = true;
      res.objective = total;
      res.assignment = path;
      res.incumbent_trace.push_back({total, res.stats.nodes, elapsed()});
      return true;
    }
    ++res.stats.failures;
    return false;
  }

  void finish(bool completed) {
    res.stats.completed = completed;
    res.proven_optimal = completed;
    res.stats.wall_s = elapsed();
  }
};

template <DpProblem P, typename Scorer>
void bab_dfs(Ctx<P>& c, Scorer& scorer, const typename P::State& s,
             int stage, double vsf) {
  if (!c.enter_node()) return;
  if (stage == c.p.n_stages()) {
    c.leaf(vsf + c.p.terminal_adjustment(s));
    return;
  }
  std::vector<int> dom = c.model.prune(s, stage, vsf, c.cut());
  if (dom.empty()) {
    ++c.res.stats.failures;
    return;
  }
  ++c.res.stats.heuristic_evals;
  std::vector<double> sc = scorer(s, stage, std::span<const int>(dom));
  for (int v : order_desc(dom, sc)) {
    auto [s2, r] = apply(c.p, s, stage, v);
    c.path.push_back(v);
    bab_dfs(c, scorer, s2, stage + 1, vsf + r);
    c.path.pop_back();
    if (c.stopped) return;
  }
}

}  // namespace detail

// Depth-first branch and bound: follow the scorer's order, tighten the
// incumbent at improving leaves, and let the model's objective cut prune
// subtrees that cannot beat it. Exhausting the tree proves the result.
template <DpProblem P, typename Scorer>
SearchResult search_bab(const P& p, const CpModel<P>& model, Scorer&& scorer,
                        const SearchLimits& limits = {}) {
  detail::Ctx<P> c{p, model, limits};
  detail::bab_dfs(c, scorer, p.initial_state(), 0, 0.0);
  c.finish(!c.stopped);
  return c.res;
}

namespace detail {

template <DpProblem P, typename Scorer>
void ilds_dfs(Ctx<P>& c, Scorer& scorer, const typename P::State& s,
              int stage, double vsf, int budget, bool& limit_hit) {
  if (!c.enter_node()) return;
  if (stage == c.p.n_stages()) {
    c.leaf(vsf + c.p.terminal_adjustment(s));
    return;
  }
  std::vector<int> dom = c.model.prune(s, stage, vsf, c.cut());
  if (dom.empty()) {
    ++c.res.stats.failures;
    return;
  }
  ++c.res.stats.heuristic_evals;
  std::vector<double> sc = scorer(s, stage, std::span<const int>(dom));
  std::vector<int> ordered = order_desc(dom, sc);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (i > 0 && budget == 0) {
      limit_hit = true;
      break;
    }
    auto [s2, r] = apply(c.p, s, stage, ordered[i]);
    c.path.push_back(ordered[i]);
    ilds_dfs(c, scorer, s2, stage + 1, vsf + r, budget - (i > 0 ? 1 : 0),
             limit_hit);
    c.path.pop_back();
    if (c.stopped) return;
  }
}

}  // namespace detail

// Iterated limited discrepancy search. Iteration d allows d deviations from
// the scorer's first choice along any root-to-leaf path; the incumbent and
// its cut persist across iterations. An iteration that never runs into its
// discrepancy budget has explored the whole (pruned) tree, which proves the
// result.
template <DpProblem P, typename Scorer>
SearchResult search_ilds(const P& p, const CpModel<P>& model, Scorer&& scorer,
                         const SearchLimits& limits = {},
                         int max_discrepancy = -1) {
  detail::Ctx<P> c{p, model, limits};
  bool proven = false;
  for (int d = 0;; ++d) {
    bool limit_hit = false;
    detail::ilds_dfs(c, scorer, p.initial_state(), 0, 0.0, d, limit_hit);
    if (c.stopped) break;
    if (!limit_hit) {
      proven = true;
      break;
    }
    if (max_discrepancy >= 0 && d >= max_discrepancy) break;
  }
  c.finish(proven);
  return c.res;
}

struct RestartOptions {
  std::int64_t scale = 1;       // Luby multiplier, in failures
  double temperature = 1.0;     // Boltzmann ordering; <= 0 plays the argmax
  std::uint64_t seed = 1;       // restart i draws from derive_seed(seed, i)
  std::int64_t max_restarts = -1;
};

namespace detail {

template <DpProblem P, typename Scorer>
void rbs_dfs(Ctx<P>& c, Scorer& scorer, Rng& rng, const RestartOptions& opt,
             const typename P::State& s, int stage, double vsf,
             std::int64_t fail_budget, std::int64_t& restart_failures,
             bool& budget_hit) {
  if (restart_failures >= fail_budget) {
    budget_hit = true;
    return;
  }
  if (!c.enter_node()) return;
  if (stage == c.p.n_stages()) {
    if (!c.leaf(vsf + c.p.terminal_adjustment(s))) ++restart_failures;
    return;
  }
  std::vector<int> dom = c.model.prune(s, stage, vsf, c.cut());
  if (dom.empty()) {
    ++c.res.stats.failures;
    ++restart_failures;
    return;
  }
  ++c.res.stats.heuristic_evals;
  std::vector<double> sc = scorer(s, stage, std::span<const int>(dom));
  for (int v : boltzmann_order(dom, sc, opt.temperature, rng)) {
    auto [s2, r] = apply(c.p, s, stage, v);
    c.path.push_back(v);
    rbs_dfs(c, scorer, rng, opt, s2, stage + 1, vsf + r, fail_budget,
            restart_failures, budget_hit);
    c.path.pop_back();
    if (c.stopped || budget_hit) return;
  }
}

}  // namespace detail

// Restart-based search: restart i runs a depth-first dive with value
// orderings sampled at the given temperature and a failure budget of
// scale * luby(i). The incumbent persists, so later restarts inherit the
// cut. A restart that exhausts the tree without spending its budget proves
// the result.
template <DpProblem P, typename Scorer>
SearchResult search_rbs(const P& p, const CpModel<P>& model, Scorer&& scorer,
                        const RestartOptions& opt,
                        const SearchLimits& limits = {}) {
  detail::Ctx<P> c{p, model, limits};
  bool proven = false;
  for (std::int64_t i = 1;; ++i) {
    if (opt.max_restarts >= 0 && i > opt.max_restarts) break;
    Rng rng(derive_seed(opt.seed, i));
    std::int64_t restart_failures = 0;
    bool budget_hit = false;
    detail::rbs_dfs(c, scorer, rng, opt, p.initial_state(), 0, 0.0,
                    opt.scale * luby(i), restart_failures, budget_hit);
    if (c.stopped) break;
    if (!budget_hit) {
      proven = true;
      break;
    }
  }
  c.finish(proven);
  return c.res;
}

}  // namespace dpcp::cp
