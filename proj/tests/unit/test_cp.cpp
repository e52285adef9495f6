#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "dpcp/cp/cache.hpp"
#include "dpcp/cp/heuristics.hpp"
#include "dpcp/cp/luby.hpp"
#include "dpcp/cp/model.hpp"
#include "dpcp/cp/search.hpp"
#include "dpcp/train/tasks.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace dpcp;

TEST(Luby, FirstFifteenTerms) {
  std::vector<std::int64_t> expect = {1, 1, 2, 1, 1, 2, 4, 1,
                                      1, 2, 1, 1, 2, 4, 8};
  for (int i = 1; i <= 15; ++i) EXPECT_EQ(cp::luby(i), expect[i - 1]) << i;
}

TEST(Cache, CountsHitsAndMisses) {
  cp::PredictionCache cache;
  int computes = 0;
  auto compute = [&] {
    ++computes;
    return std::vector<double>{1.0, 2.0};
  };
  const auto& a = cache.get("k1", compute);
  EXPECT_EQ(a, (std::vector<double>{1.0, 2.0}));
  const auto& b = cache.get("k1", compute);
  EXPECT_EQ(&a, &b);
  cache.get("k2", compute);
  EXPECT_EQ(computes, 2);
  EXPECT_EQ(cache.hits(), 1);
  EXPECT_EQ(cache.misses(), 2);
  EXPECT_EQ(cache.size(), 2);
  cache.clear();
  EXPECT_EQ(cache.hits(), 0);
  EXPECT_EQ(cache.size(), 0);
}

namespace {

std::vector<std::vector<cp::Filter>> filter_orderings() {
  std::vector<cp::Filter> f = {cp::Filter::validity, cp::Filter::dominance,
                               cp::Filter::bound};
  std::sort(f.begin(), f.end());
  std::vector<std::vector<cp::Filter>> all;
  do {
    all.push_back(f);
  } while (std::next_permutation(f.begin(), f.end()));
  return all;
}

}  // namespace

TEST(CpModel, FilterOrderingIsImmaterial) {
  auto inst = fixtures::tsptw_hand();
  tsptw::Dp p(inst);
  // Root with an incumbent of -50: the cut drops customer 3 (travel 72),
  // validity and dominance keep everything.
  for (const auto& order : filter_orderings()) {
    cp::CpModel<tsptw::Dp> model(p, order);
    EXPECT_EQ(model.prune(p.initial_state(), 0, 0.0, -50.0),
              (std::vector<int>{1, 2}));
  }
  // Late state where validity kills 2 and dominance kills 3.
  tsptw::State late;
  late.remaining = IndexSet(4);
  late.remaining.insert(2);
  late.remaining.insert(3);
  late.last = 1;
  late.time = 90;
  for (const auto& order : filter_orderings()) {
    cp::CpModel<tsptw::Dp> model(p, order);
    EXPECT_TRUE(model
                    .prune(late, 1, 0.0,
                           -std::numeric_limits<double>::infinity())
                    .empty());
  }
}

TEST(CpModel, NoIncumbentDisablesTheCut) {
  auto inst = fixtures::tsptw_hand();
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  EXPECT_EQ(model.prune(p.initial_state(), 0, 0.0,
                        -std::numeric_limits<double>::infinity()),
            (std::vector<int>{1, 2, 3}));
}

TEST(Search, BabProvesHandOptimum) {
  auto inst = fixtures::tsptw_hand();
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  cp::SearchResult res = cp::search_bab(p, model, cp::LexScorer{});
  ASSERT_TRUE(res.feasible);
  EXPECT_TRUE(res.proven_optimal);
  EXPECT_TRUE(res.stats.completed);
  EXPECT_EQ(res.objective, -148.0);
  EXPECT_EQ(res.assignment, (std::vector<int>{1, 2, 3}));
  EXPECT_GT(res.stats.nodes, 0);
}

TEST(Search, IncumbentTraceImprovesStrictly) {
  auto inst = tsptw::generate(7, 11);
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  cp::SearchResult res = cp::search_bab(p, model, cp::LexScorer{});
  ASSERT_TRUE(res.feasible);
  ASSERT_FALSE(res.incumbent_trace.empty());
  for (size_t i = 1; i < res.incumbent_trace.size(); ++i) {
    EXPECT_GT(res.incumbent_trace[i].objective,
              res.incumbent_trace[i - 1].objective);
    EXPECT_GE(res.incumbent_trace[i].nodes, res.incumbent_trace[i - 1].nodes);
  }
  EXPECT_EQ(res.incumbent_trace.back().objective, res.objective);
}

TEST(Search, BabAndIldsMatchExactSolveOnTsptw) {
  for (int n = 4; n <= 7; ++n) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto inst = tsptw::generate(n, seed);
      tsptw::Dp p(inst);
      cp::CpModel<tsptw::Dp> model(p);
      auto exact = bellman_solve(p);
      for (int h = 0; h < 2; ++h) {
        auto run = [&](auto scorer) {
          return h == 0 ? cp::search_bab(p, model, scorer)
                        : cp::search_ilds(p, model, scorer);
        };
        cp::SearchResult lex = run(cp::LexScorer{});
        cp::SearchResult near = run(cp::NearestScorer{&inst});
        ASSERT_EQ(lex.feasible, exact.feasible) << n << " " << seed;
        ASSERT_EQ(near.feasible, exact.feasible);
        EXPECT_TRUE(lex.proven_optimal);
        EXPECT_TRUE(near.proven_optimal);
        if (!exact.feasible) continue;
        EXPECT_EQ(lex.objective, exact.value);
        EXPECT_EQ(near.objective, exact.value);
        EXPECT_EQ(*oracles::tsptw_tour_value(inst, lex.assignment),
                  lex.objective);
        EXPECT_EQ(*oracles::tsptw_tour_value(inst, near.assignment),
                  near.objective);
      }
    }
  }
}

TEST(Search, BabAndIldsMatchExactSolveOnPortfolio) {
  for (auto mode : {port::Mode::continuous, port::Mode::discrete}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto inst = port::generate(9, seed, mode);
      port::Dp p(inst);
      cp::CpModel<port::Dp> model(p);
      auto exact = bellman_solve(p);
      ASSERT_TRUE(exact.feasible);
      cp::SearchResult bab = cp::search_bab(p, model, cp::LexScorer{});
      cp::SearchResult ilds = cp::search_ilds(p, model, cp::LexScorer{});
      ASSERT_TRUE(bab.feasible);
      ASSERT_TRUE(ilds.feasible);
      EXPECT_TRUE(bab.proven_optimal);
      EXPECT_TRUE(ilds.proven_optimal);
      // Rewards land in one final-stage lump computed from stage-ordered
      // sums, so search and recursion agree bitwise.
      EXPECT_EQ(bab.objective, exact.value);
      EXPECT_EQ(ilds.objective, exact.value);
      std::vector<bool> take(inst.n, false);
      for (int i = 0; i < inst.n; ++i) take[i] = bab.assignment[i] == 1;
      EXPECT_EQ(*port::objective(inst, take), bab.objective);
    }
  }
}

TEST(Search, IldsDiscrepancyCapBlocksProof) {
  auto inst = tsptw::generate(6, 3);
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  cp::SearchResult capped =
      cp::search_ilds(p, model, cp::LexScorer{}, {}, 0);
  EXPECT_FALSE(capped.proven_optimal);
  cp::SearchResult full = cp::search_ilds(p, model, cp::LexScorer{});
  EXPECT_TRUE(full.proven_optimal);
  if (capped.feasible && full.feasible)
    EXPECT_LE(capped.objective, full.objective);
}

TEST(Search, NodeLimitStopsWithoutProof) {
  auto inst = tsptw::generate(7, 5);
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  cp::SearchLimits limits;
  limits.node_limit = 3;
  cp::SearchResult res = cp::search_bab(p, model, cp::LexScorer{}, limits);
  EXPECT_LE(res.stats.nodes, 3);
  EXPECT_FALSE(res.stats.completed);
  EXPECT_FALSE(res.proven_optimal);
}

TEST(Search, RbsProvesOnceABudgetCoversTheTree) {
  auto inst = fixtures::tsptw_hand();
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  auto exact = bellman_solve(p);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cp::RestartOptions opt;
    opt.scale = 1;  // tiny budgets force several restarts first
    opt.temperature = 2.0;
    opt.seed = seed;
    cp::SearchResult res = cp::search_rbs(p, model, cp::LexScorer{}, opt);
    ASSERT_TRUE(res.feasible);
    EXPECT_TRUE(res.proven_optimal);
    EXPECT_EQ(res.objective, exact.value);
  }
}

TEST(Search, RbsSameSeedSameResult) {
  auto inst = tsptw::generate(7, 9);
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  cp::RestartOptions opt;
  opt.scale = 2;
  opt.temperature = 5.0;
  opt.seed = 77;
  cp::SearchResult a = cp::search_rbs(p, model, cp::LexScorer{}, opt);
  cp::SearchResult b = cp::search_rbs(p, model, cp::LexScorer{}, opt);
  EXPECT_EQ(a.feasible, b.feasible);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.stats.nodes, b.stats.nodes);
  EXPECT_EQ(a.stats.failures, b.stats.failures);
}

TEST(Search, RbsMaxRestartsBoundsTheRun) {
  auto inst = tsptw::generate(8, 2);
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  cp::RestartOptions opt;
  opt.scale = 1;
  opt.temperature = 1.0;
  opt.seed = 3;
  opt.max_restarts = 2;
  cp::SearchResult res = cp::search_rbs(p, model, cp::LexScorer{}, opt);
  // Two restarts of budget 1 cannot exhaust an 8-customer tree.
  EXPECT_FALSE(res.proven_optimal);
}

namespace {

// Customers 1 and 2 mirror each other across the depot-to-3 diagonal, so
// the prefixes 1 -> 2 -> 3 and 2 -> 1 -> 3 land in the same state (same
// set, same last stop, time 34) with customer 4 still open. That state is
// internal, the search reaches it twice, and the prediction cache must hit.
dpcp::tsptw::Instance square_instance() {
  dpcp::tsptw::Instance inst;
  inst.n = 5;
  inst.coords = {{0, 0}, {10, 0}, {0, 10}, {10, 10}, {30, 30}};
  inst.dist = {{0, 10, 10, 14, 42},
               {10, 0, 14, 10, 36},
               {10, 14, 0, 10, 36},
               {14, 10, 10, 0, 28},
               {42, 36, 36, 28, 0}};
  inst.windows = {{0, 0}, {0, 300}, {0, 300}, {0, 300}, {0, 300}};
  inst.seed = 0;
  return inst;
}

}  // namespace

TEST(Search, PredictionCacheIsTransparent) {
  auto inst = square_instance();
  tsptw::Dp p(inst);
  cp::CpModel<tsptw::Dp> model(p);
  nn::Network net(train::TsptwTask::network(nn::Head::q), 19);

  std::int64_t evals_plain = 0;
  cp::NetScorer<train::TsptwTask> plain{&p, &inst, &net, nullptr,
                                        &evals_plain};
  cp::SearchResult without = cp::search_bab(p, model, plain);

  cp::PredictionCache cache;
  std::int64_t evals_cached = 0;
  cp::NetScorer<train::TsptwTask> scorer{&p, &inst, &net, &cache,
                                         &evals_cached};
  cp::SearchResult with = cp::search_bab(p, model, scorer);

  EXPECT_EQ(with.objective, without.objective);
  EXPECT_EQ(with.assignment, without.assignment);
  EXPECT_EQ(with.proven_optimal, without.proven_optimal);
  EXPECT_EQ(with.stats.nodes, without.stats.nodes);
  EXPECT_EQ(with.stats.failures, without.stats.failures);
  EXPECT_GT(cache.hits(), 0);
  EXPECT_EQ(evals_cached, cache.misses());
  EXPECT_EQ(evals_plain, cache.hits() + cache.misses());
  EXPECT_LT(evals_cached, evals_plain);
}

TEST(Search, NetScorerAgreesWithNetworkRow) {
  auto inst = fixtures::tsptw_hand();
  tsptw::Dp p(inst);
  nn::Network net(train::TsptwTask::network(nn::Head::q), 4);
  cp::NetScorer<train::TsptwTask> scorer{&p, &inst, &net, nullptr, nullptr};
  std::vector<int> values = {1, 2, 3};
  std::vector<double> sc =
      scorer(p.initial_state(), 0, std::span<const int>(values));
  std::vector<double> q =
      net.q_values(train::TsptwTask::net_input(inst, p.initial_state(), 0));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(sc[i], q[values[i]]);
}
