#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpcp/dp/problem.hpp"
#include "dpcp/util/index_set.hpp"
#include "dpcp/util/key.hpp"
#include "dpcp/util/rng.hpp"

namespace dpcp::tsptw {

// Travel times are rounded Euclidean distances on a 100x100 grid, so no
// entry can exceed ceil(sqrt(2) * 100).
inline constexpr int kGridSize = 100;
inline constexpr int kMaxDistance = 142;

// Customer 0 is the depot. Its window is never consulted: the depot is not a
// control value and the final return leg carries no window check.
struct Instance {
  int n = 0;
  std::vector<std::array<double, 2>> coords;
  std::vector<std::vector<int>> dist;
  std::vector<std::array<std::int64_t, 2>> windows;  // [l, u]
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["problem"] = "tsptw";
    j["n"] = n;
    j["coords"] = coords;
    j["dist"] = dist;
    j["windows"] = windows;
    j["seed"] = seed;
    return j;
  }

  static Instance from_json(const nlohmann::json& j) {
    if (j.at("problem").get<std::string>() != "tsptw")
      throw std::invalid_argument("not a tsptw instance");
    Instance inst;
    inst.n = j.at("n").get<int>();
    inst.coords = j.at("coords").get<std::vector<std::array<double, 2>>>();
    // Distances are read back, not recomputed, so files are self-contained.
    inst.dist = j.at("dist").get<std::vector<std::vector<int>>>();
    inst.windows =
        j.at("windows").get<std::vector<std::array<std::int64_t, 2>>>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    return inst;
  }
};

inline int rounded_distance(const std::array<double, 2>& a,
                            const std::array<double, 2>& b) {
  double dx = a[0] - b[0];
  double dy = a[1] - b[1];
  return static_cast<int>(std::floor(std::sqrt(dx * dx + dy * dy) + 0.5));
}

// Instance plus the feasible permutation its windows were built around.
// The witness never leaves test code; solvers only see the instance.
struct GeneratedInstance {
  Instance instance;
  std::vector<int> witness_tour;  // depot followed by all customers
};

// Windows are laid along a hidden random tour: each next customer's release
// l is drawn in [arrival, arrival + G] and its deadline u in [l, l + W], so
// the tour itself stays feasible.
inline GeneratedInstance generate_with_witness(int n, std::uint64_t seed,
                                               int W = 100, int G = 10) {
  if (n < 2) throw std::invalid_argument("tsptw: need at least 2 customers");
  Rng rng(seed);
  GeneratedInstance out;
  Instance& inst = out.instance;
  inst.n = n;
  inst.seed = seed;
  inst.coords.resize(n);
  for (auto& c : inst.coords) {
    c[0] = rng.uniform_real(0.0, kGridSize);
    c[1] = rng.uniform_real(0.0, kGridSize);
  }
  inst.dist.assign(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      inst.dist[i][j] = inst.dist[j][i] =
          rounded_distance(inst.coords[i], inst.coords[j]);

  std::vector<int> perm;
  for (int i = 1; i < n; ++i) perm.push_back(i);
  rng.shuffle(perm);
  out.witness_tour.push_back(0);
  for (int c : perm) out.witness_tour.push_back(c);

  inst.windows.assign(n, {0, 0});
  std::int64_t prev_l = 0;
  int prev = 0;
  for (int c : perm) {
    std::int64_t arrive = prev_l + inst.dist[prev][c];
    std::int64_t l = rng.uniform_int(arrive, arrive + G);
    std::int64_t u = rng.uniform_int(l, l + W);
    inst.windows[c] = {l, u};
    prev_l = l;
    prev = c;
  }
  return out;
}

inline Instance generate(int n, std::uint64_t seed, int W = 100, int G = 10) {
  return generate_with_witness(n, seed, W, G).instance;
}

struct State {
  IndexSet remaining;     // customers still to visit; never holds the depot
  int last = 0;           // last serviced customer
  std::int64_t time = 0;  // current time
};

// DP view of an instance: one stage per non-depot customer, controls are
// customer indices, rewards are negated travel times and the return leg is
// charged through the terminal adjustment.
class Dp {
 public:
  using State = tsptw::State;

  explicit Dp(const Instance& inst) : inst_(&inst) {
    for (int i = 1; i < inst.n; ++i) domain_.push_back(i);
  }

  const Instance& instance() const { return *inst_; }

  int n_stages() const { return inst_->n - 1; }
  int action_count() const { return inst_->n; }

  std::span<const int> control_domain(int) const { return domain_; }

  State initial_state() const {
    State s;
    s.remaining = IndexSet::full_range(inst_->n, 1, inst_->n);
    s.last = 0;
    s.time = 0;
    return s;
  }

  bool is_valid(const State& s, int, int a) const {
    if (!s.remaining.contains(a)) return false;
    return inst_->windows[a][1] >= s.time + inst_->dist[s.last][a];
  }

  // Reject a move whose successor strands a still-remaining customer behind
  // its deadline. Strict comparison: arriving exactly at u_j is serviceable.
  bool is_nondominated(const State& s, int, int a) const {
    std::int64_t t_next =
        std::max(s.time + inst_->dist[s.last][a],
                 static_cast<std::int64_t>(inst_->windows[a][0]));
    bool ok = true;
    s.remaining.for_each([&](int j) {
      if (j != a && t_next > inst_->windows[j][1]) ok = false;
    });
    return ok;
  }

  State transition(const State& s, int, int a) const {
    State next = s;
    next.remaining.erase(a);
    next.last = a;
    next.time = std::max(s.time + inst_->dist[s.last][a],
                         static_cast<std::int64_t>(inst_->windows[a][0]));
    return next;
  }

  double reward(const State& s, int, int a) const {
    return -static_cast<double>(inst_->dist[s.last][a]);
  }

  double terminal_adjustment(const State& s) const {
    return -static_cast<double>(inst_->dist[s.last][0]);
  }

  // Strict bound on any tour length.
  double upper_bound() const {
    return static_cast<double>((inst_->n + 1) * kMaxDistance);
  }

  // Future rewards are all non-positive.
  double completion_bound(const State&, int) const { return 0.0; }

  double improvement_step() const { return 1.0; }

  void write_key(const State& s, KeyBuilder& kb) const {
    kb.u16(static_cast<std::uint16_t>(s.last));
    kb.i64(s.time);
    kb.u16(static_cast<std::uint16_t>(s.remaining.count()));
    s.remaining.for_each(
        [&](int j) { kb.u16(static_cast<std::uint16_t>(j)); });
  }

 private:
  const Instance* inst_;
  std::vector<int> domain_;
};

static_assert(DpProblem<Dp>);

struct Features {
  // Per customer: x/100, y/100, l/L, u/L, still-to-visit, last-visited.
  std::vector<std::array<double, 6>> nodes;
  std::vector<std::vector<double>> edges;  // dist / 142
  std::vector<bool> mask;                  // feasible controls over all n ids
};

inline Features features(const Instance& inst, const State& s) {
  Features f;
  std::int64_t window_max = 1;
  for (const auto& w : inst.windows) window_max = std::max(window_max, w[1]);
  const double L = static_cast<double>(window_max);
  f.nodes.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    f.nodes[i] = {inst.coords[i][0] / kGridSize,
                  inst.coords[i][1] / kGridSize,
                  static_cast<double>(inst.windows[i][0]) / L,
                  static_cast<double>(inst.windows[i][1]) / L,
                  s.remaining.contains(i) ? 1.0 : 0.0,
                  s.last == i ? 1.0 : 0.0};
  }
  f.edges.assign(inst.n, std::vector<double>(inst.n, 0.0));
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j)
      f.edges[i][j] = static_cast<double>(inst.dist[i][j]) / kMaxDistance;
  f.mask.assign(inst.n, false);
  Dp dp(inst);
  if (!s.remaining.empty()) {
    for (int a : feasible_controls(dp, s, inst.n - 1 - s.remaining.count()))
      f.mask[a] = true;
  }
  return f;
}

// Closest candidate by travel time from the state's last customer; ties go to
// the smallest index.
inline int nearest_value(const Instance& inst, const State& s,
                         std::span<const int> candidates) {
  if (candidates.empty())
    throw ContractViolation("nearest_value: empty candidate set");
  int best = candidates[0];
  for (int a : candidates.subspan(1)) {
    int da = inst.dist[s.last][a];
    int db = inst.dist[s.last][best];
    if (da < db || (da == db && a < best)) best = a;
  }
  return best;
}

}  // namespace dpcp::tsptw
