#include <array>
#include <span>
#include <vector>

#include <gtest/gtest.h>

#include "dpcp/dp/problem.hpp"

namespace {

// Three stages, controls {0,1,2}, reward v*(stage+1), control 2 forbidden at
// stage 1, parity bonus of 0.5 on an even control sum. Optimum worked out by
// hand: assignment [2,1,2], total 2 + 2 + 6 = 10, odd sum so no bonus.
struct Toy {
  using State = int;  // running control sum

  int n_stages() const { return 3; }
  int action_count() const { return 3; }
  std::span<const int> control_domain(int) const {
    static constexpr std::array<int, 3> d{0, 1, 2};
    return d;
  }
  State initial_state() const { return 0; }
  bool is_valid(const State&, int stage, int v) const {
    return !(stage == 1 && v == 2);
  }
  bool is_nondominated(const State&, int, int) const { return true; }
  State transition(const State& s, int, int v) const { return s + v; }
  double reward(const State&, int stage, int v) const {
    return static_cast<double>(v * (stage + 1));
  }
  double terminal_adjustment(const State& s) const {
    return s % 2 == 0 ? 0.5 : 0.0;
  }
  double upper_bound() const { return 13.0; }
  double completion_bound(const State&, int) const { return 13.0; }
  double improvement_step() const { return 0.5; }
  void write_key(const State& s, dpcp::KeyBuilder& kb) const { kb.i64(s); }
};
static_assert(dpcp::DpProblem<Toy>);

// One stage, controls {0,1}, reward v; the dominance filter rejects v=1, so
// running with the filter on must change the answer. Used to check that the
// solver honours the flag rather than the filter being correct here.
struct Prune {
  using State = int;

  int n_stages() const { return 1; }
  int action_count() const { return 2; }
  std::span<const int> control_domain(int) const {
    static constexpr std::array<int, 2> d{0, 1};
    return d;
  }
  State initial_state() const { return 0; }
  bool is_valid(const State&, int, int) const { return true; }
  bool is_nondominated(const State&, int, int v) const { return v != 1; }
  State transition(const State& s, int, int v) const { return s + v; }
  double reward(const State&, int, int v) const { return v; }
  double terminal_adjustment(const State&) const { return 0.0; }
  double upper_bound() const { return 1.0; }
  double completion_bound(const State&, int) const { return 1.0; }
  double improvement_step() const { return 1.0; }
  void write_key(const State& s, dpcp::KeyBuilder& kb) const { kb.i64(s); }
};
static_assert(dpcp::DpProblem<Prune>);

struct NoStages {
  using State = int;

  int n_stages() const { return 0; }
  int action_count() const { return 1; }
  std::span<const int> control_domain(int) const {
    static constexpr std::array<int, 1> d{0};
    return d;
  }
  State initial_state() const { return 0; }
  bool is_valid(const State&, int, int) const { return true; }
  bool is_nondominated(const State&, int, int) const { return true; }
  State transition(const State& s, int, int) const { return s; }
  double reward(const State&, int, int) const { return 0.0; }
  double terminal_adjustment(const State&) const { return 0.25; }
  double upper_bound() const { return 1.0; }
  double completion_bound(const State&, int) const { return 1.0; }
  double improvement_step() const { return 1.0; }
  void write_key(const State& s, dpcp::KeyBuilder& kb) const { kb.i64(s); }
};
static_assert(dpcp::DpProblem<NoStages>);

struct DeadEnd {
  using State = int;

  int n_stages() const { return 1; }
  int action_count() const { return 1; }
  std::span<const int> control_domain(int) const {
    static constexpr std::array<int, 1> d{0};
    return d;
  }
  State initial_state() const { return 0; }
  bool is_valid(const State&, int, int) const { return false; }
  bool is_nondominated(const State&, int, int) const { return true; }
  State transition(const State& s, int, int) const { return s; }
  double reward(const State&, int, int) const { return 0.0; }
  double terminal_adjustment(const State&) const { return 0.0; }
  double upper_bound() const { return 0.0; }
  double completion_bound(const State&, int) const { return 0.0; }
  double improvement_step() const { return 1.0; }
  void write_key(const State& s, dpcp::KeyBuilder& kb) const { kb.i64(s); }
};
static_assert(dpcp::DpProblem<DeadEnd>);

}  // namespace

TEST(FeasibleControls, FiltersValidityAndDominance) {
  Toy p;
  EXPECT_EQ(dpcp::feasible_controls(p, 0, 0), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(dpcp::feasible_controls(p, 0, 1), (std::vector<int>{0, 1}));

  Prune q;
  EXPECT_EQ(dpcp::feasible_controls(q, 0, 0), (std::vector<int>{0}));
}

TEST(FeasibleControls, StageOutOfRangeThrows) {
  Toy p;
  EXPECT_THROW(dpcp::feasible_controls(p, 0, 3), dpcp::ContractViolation);
  EXPECT_THROW(dpcp::feasible_controls(p, 0, -1), dpcp::ContractViolation);
}

TEST(Apply, ReturnsSuccessorAndReward) {
  Toy p;
  auto [next, r] = dpcp::apply(p, 0, 2, 2);
  EXPECT_EQ(next, 2);
  EXPECT_DOUBLE_EQ(r, 6.0);
}

TEST(Apply, InvalidTransitionCarriesLocation) {
  Toy p;
  try {
    dpcp::apply(p, 0, 1, 2);
    FAIL() << "expected InvalidTransition";
  } catch (const dpcp::InvalidTransition& e) {
    EXPECT_EQ(e.stage, 1);
    EXPECT_EQ(e.value, 2);
  }
}

TEST(CanonicalKey, SeparatesStagesAndStates) {
  Toy p;
  EXPECT_EQ(dpcp::canonical_key(p, 3, 1), dpcp::canonical_key(p, 3, 1));
  EXPECT_NE(dpcp::canonical_key(p, 3, 1), dpcp::canonical_key(p, 3, 2));
  EXPECT_NE(dpcp::canonical_key(p, 3, 1), dpcp::canonical_key(p, 4, 1));
}

TEST(BellmanSolve, FindsHandComputedOptimum) {
  Toy p;
  auto res = dpcp::bellman_solve(p);
  EXPECT_TRUE(res.feasible);
  EXPECT_DOUBLE_EQ(res.value, 10.0);
  EXPECT_EQ(res.assignment, (std::vector<int>{2, 1, 2}));
  EXPECT_GT(res.expanded, 0);
}

TEST(BellmanSolve, DominanceFlagIsHonoured) {
  Prune p;
  auto off = dpcp::bellman_solve(p, dpcp::Dominance::off);
  EXPECT_DOUBLE_EQ(off.value, 1.0);
  EXPECT_EQ(off.assignment, (std::vector<int>{1}));

  auto on = dpcp::bellman_solve(p, dpcp::Dominance::on);
  EXPECT_DOUBLE_EQ(on.value, 0.0);
  EXPECT_EQ(on.assignment, (std::vector<int>{0}));
}

TEST(BellmanSolve, ZeroStagesYieldsTerminalAdjustment) {
  NoStages p;
  auto res = dpcp::bellman_solve(p);
  EXPECT_TRUE(res.feasible);
  EXPECT_DOUBLE_EQ(res.value, 0.25);
  EXPECT_TRUE(res.assignment.empty());
}

TEST(BellmanSolve, ReportsInfeasibility) {
  DeadEnd p;
  auto res = dpcp::bellman_solve(p);
  EXPECT_FALSE(res.feasible);
}
