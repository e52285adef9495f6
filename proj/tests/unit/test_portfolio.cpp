#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "dpcp/problems/portfolio.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace dpcp;
using port::Instance;
using port::Mode;

using fixtures::port_exact;
using fixtures::port_floors;

TEST(Objective, ExactFixtureBothModes) {
  for (Mode mode : {Mode::continuous, Mode::discrete}) {
    Instance inst = port_exact(mode);
    EXPECT_EQ(port::objective(inst, {false, false}), 0.0);
    EXPECT_EQ(port::objective(inst, {true, false}), 5.0);
    EXPECT_FALSE(port::objective(inst, {false, true}).has_value());
    EXPECT_FALSE(port::objective(inst, {true, true}).has_value());
  }
}

TEST(Objective, DiscreteFloorsEachRoot) {
  Instance inst = port_floors(Mode::discrete);
  EXPECT_EQ(port::objective(inst, {true, true}), -3.0);

  Instance cont = port_floors(Mode::continuous);
  // 7 - 5*sqrt(5) + 5*cbrt(2) - 5*2^(1/4), frozen to 15 digits.
  auto v = port::objective(cont, {true, true});
  ASSERT_TRUE(v.has_value());
  EXPECT_NEAR(*v, -3.826770213038188, 1e-12);
}

TEST(Objective, SelectionLengthMismatchThrows) {
  Instance inst = port_exact(Mode::continuous);
  EXPECT_THROW(port::objective(inst, {true}), std::invalid_argument);
}

TEST(Bellman, ExactFixtureOptimum) {
  for (Mode mode : {Mode::continuous, Mode::discrete}) {
    Instance inst = port_exact(mode);
    port::Dp dp(inst);
    auto res = bellman_solve(dp);
    EXPECT_TRUE(res.feasible);
    EXPECT_DOUBLE_EQ(res.value, 5.0);
    EXPECT_EQ(res.assignment, (std::vector<int>{1, 0}));
  }
}

TEST(Bellman, FloorFixtureOptimumIsEmptySelection) {
  // {}: 0, {0}: -2, {1}: -6, {0,1}: -3 (discrete) / -3.8268 (continuous).
  for (Mode mode : {Mode::continuous, Mode::discrete}) {
    Instance inst = port_floors(mode);
    port::Dp dp(inst);
    auto res = bellman_solve(dp);
    EXPECT_TRUE(res.feasible);
    EXPECT_DOUBLE_EQ(res.value, 0.0);
    EXPECT_EQ(res.assignment, (std::vector<int>{0, 0}));
  }
}

TEST(Dp, SkippingIsAlwaysValid) {
  Instance inst = port_exact(Mode::continuous);
  port::Dp dp(inst);
  port::State s = dp.initial_state();
  EXPECT_TRUE(dp.is_valid(s, 0, 0));
  EXPECT_TRUE(dp.is_valid(s, 1, 0));
  EXPECT_TRUE(dp.is_valid(s, 0, 1));   // cost 3 == budget
  EXPECT_FALSE(dp.is_valid(s, 1, 1));  // cost 4 > budget

  auto [s1, r1] = apply(dp, s, 0, 1);
  EXPECT_EQ(s1.spent, 3);
  EXPECT_DOUBLE_EQ(r1, 0.0);  // rewards accrue only at the last stage
  EXPECT_FALSE(dp.is_valid(s1, 1, 1));
  auto [s2, r2] = apply(dp, s1, 1, 0);
  EXPECT_EQ(s2.spent, 3);
  EXPECT_DOUBLE_EQ(r2, 5.0);
  EXPECT_DOUBLE_EQ(dp.terminal_adjustment(s2), 0.0);
}

TEST(Generator, BudgetIsHalfTotalCost) {
  for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
    auto inst = port::generate(10, seed);
    std::int64_t total = 0;
    for (int b : inst.b) total += b;
    EXPECT_EQ(inst.budget, total / 2);
    for (int i = 0; i < inst.n; ++i) {
      EXPECT_GE(inst.b[i], 0);
      EXPECT_LE(inst.b[i], 100);
      EXPECT_GE(inst.mu[i], 0.0);
      EXPECT_LE(inst.mu[i], 100.0);
      EXPECT_DOUBLE_EQ(inst.mu[i], std::floor(inst.mu[i]));
      EXPECT_LE(inst.sigma[i], inst.mu[i]);
      EXPECT_LE(inst.gamma[i], inst.mu[i]);
      EXPECT_LE(inst.kappa[i], inst.mu[i]);
    }
  }
}

TEST(Generator, DeterministicPerSeed) {
  auto a = port::generate(9, 42).to_json().dump();
  auto b = port::generate(9, 42).to_json().dump();
  auto c = port::generate(9, 43).to_json().dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Json, RoundTripIsExact) {
  for (Mode mode : {Mode::continuous, Mode::discrete}) {
    auto inst = port::generate(11, 5, mode);
    auto dumped = inst.to_json().dump();
    auto back = Instance::from_json(nlohmann::json::parse(dumped));
    EXPECT_EQ(back.to_json().dump(), dumped);
    EXPECT_EQ(back.mode, mode);
  }
}

TEST(Oracle, AgreesWithBellmanOnSmallInstances) {
  for (int n : {8, 10, 12}) {
    for (Mode mode : {Mode::continuous, Mode::discrete}) {
      auto inst = port::generate(n, 2000 + n, mode);
      port::Dp dp(inst);
      auto res = bellman_solve(dp);
      auto best = oracles::port_best_subset(inst);
      ASSERT_TRUE(res.feasible);
      double tol = mode == Mode::discrete
                       ? 0.0
                       : 1e-9 * std::max(1.0, std::abs(best.value));
      EXPECT_NEAR(res.value, best.value, tol) << "n=" << n;

      // The reported assignment replays to the reported value.
      std::vector<bool> sel;
      for (int v : res.assignment) sel.push_back(v == 1);
      auto replay = oracles::port_subset_value(inst, sel);
      ASSERT_TRUE(replay.has_value());
      EXPECT_NEAR(*replay, res.value, tol);
    }
  }
}

TEST(CompletionBound, IsAdmissibleEverywhere) {
  for (Mode mode : {Mode::continuous, Mode::discrete}) {
    auto inst = port::generate(10, 31, mode);
    port::Dp dp(inst);
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
      // Random feasible prefix.
      port::State s = dp.initial_state();
      int stage = 0;
      int depth = static_cast<int>(rng.below(static_cast<std::uint64_t>(inst.n)));
      double collected = 0.0;
      for (; stage < depth; ++stage) {
        int a = static_cast<int>(rng.below(2));
        if (!dp.is_valid(s, stage, a)) a = 0;
        collected += dp.reward(s, stage, a);
        s = dp.transition(s, stage, a);
      }
      // Best completion by brute force over the remaining items.
      int rem = inst.n - stage;
      double best = -1e300;
      for (std::uint64_t mask = 0; mask < (1ULL << rem); ++mask) {
        port::State t = s;
        double extra = 0.0;
        bool ok = true;
        for (int k = 0; k < rem && ok; ++k) {
          int a = (mask >> k) & 1;
          if (!dp.is_valid(t, stage + k, a)) {
            ok = false;
            break;
          }
          extra += dp.reward(t, stage + k, a);
          t = dp.transition(t, stage + k, a);
        }
        if (ok) best = std::max(best, extra + dp.terminal_adjustment(t));
      }
      EXPECT_GE(dp.completion_bound(s, stage) + 1e-9, best)
          << "mode=" << port::mode_name(mode) << " trial=" << trial;
      (void)collected;
    }
  }
}

TEST(Features, ShapesStayNormalised) {
  auto gen = port::generate(7, 12);
  port::Dp dp(gen);
  auto f = port::features(gen, dp.initial_state(), 0);
  ASSERT_EQ(f.items.size(), 7u);
  EXPECT_EQ(f.current, 0);
  EXPECT_TRUE(f.mask[0]);
  EXPECT_EQ(f.mask[1], dp.is_valid(dp.initial_state(), 0, 1));
  for (const auto& item : f.items)
    for (double v : item) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
}

TEST(Features, FlagsTrackProgress) {
  Instance inst = port_exact(Mode::continuous);
  port::Dp dp(inst);
  port::State s = dp.initial_state();
  auto f = port::features(inst, s, 0);
  EXPECT_TRUE(f.mask[0]);
  EXPECT_TRUE(f.mask[1]);               // b_0 = 3 fits the budget exactly
  EXPECT_DOUBLE_EQ(f.items[0][6], 1.0);  // current-stage flag
  EXPECT_DOUBLE_EQ(f.items[1][6], 0.0);
  EXPECT_DOUBLE_EQ(f.items[1][7], 1.0);  // item 1 never fits
  EXPECT_DOUBLE_EQ(f.items[0][8], 1.0);  // full budget left

  auto [s1, r] = apply(dp, s, 0, 1);
  (void)r;
  auto f1 = port::features(inst, s1, 1);
  EXPECT_DOUBLE_EQ(f1.items[0][5], 1.0);  // item 0 now considered
  EXPECT_DOUBLE_EQ(f1.items[1][6], 1.0);
  EXPECT_TRUE(f1.mask[0]);
  EXPECT_FALSE(f1.mask[1]);
  EXPECT_DOUBLE_EQ(f1.items[0][8], 0.0);  // budget exhausted
}

TEST(UpperBound, DominatesEveryObjective) {
  for (Mode mode : {Mode::continuous, Mode::discrete}) {
    auto inst = port::generate(10, 77, mode);
    port::Dp dp(inst);
    auto best = oracles::port_best_subset(inst);
    EXPECT_GE(dp.upper_bound(), best.value);
  }
}
