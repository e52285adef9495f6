#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpcp/dp/problem.hpp"
#include "dpcp/util/key.hpp"
#include "dpcp/util/rng.hpp"

namespace dpcp::port {

enum class Mode { continuous, discrete };

inline const char* mode_name(Mode m) {
  return m == Mode::continuous ? "continuous" : "discrete";
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "continuous") return Mode::continuous;
  if (s == "discrete") return Mode::discrete;
  throw std::invalid_argument("unknown portfolio mode: " + s);
}

// Items have an integer cost b and four moment coefficients; the budget is
// half the total cost. lambda weights the expected return, deviation,
// skewness and kurtosis terms of the objective.
struct Instance {
  int n = 0;
  std::vector<int> b;
  std::vector<double> mu, sigma, gamma, kappa;
  std::int64_t budget = 0;
  std::array<double, 4> lambda{1.0, 5.0, 5.0, 5.0};
  Mode mode = Mode::continuous;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["problem"] = "port";
    j["n"] = n;
    j["b"] = b;
    j["mu"] = mu;
    j["sigma"] = sigma;
    j["gamma"] = gamma;
    j["kappa"] = kappa;
    j["B"] = budget;
    j["lambda"] = lambda;
    j["mode"] = mode_name(mode);
    j["seed"] = seed;
    return j;
  }

  static Instance from_json(const nlohmann::json& j) {
    if (j.at("problem").get<std::string>() != "port")
      throw std::invalid_argument("not a port instance");
    Instance inst;
    inst.n = j.at("n").get<int>();
    inst.b = j.at("b").get<std::vector<int>>();
    inst.mu = j.at("mu").get<std::vector<double>>();
    inst.sigma = j.at("sigma").get<std::vector<double>>();
    inst.gamma = j.at("gamma").get<std::vector<double>>();
    inst.kappa = j.at("kappa").get<std::vector<double>>();
    inst.budget = j.at("B").get<std::int64_t>();
    inst.lambda = j.at("lambda").get<std::array<double, 4>>();
    inst.mode = mode_from_name(j.at("mode").get<std::string>());
    inst.seed = j.at("seed").get<std::uint64_t>();
    return inst;
  }
};

inline Instance generate(int n, std::uint64_t seed,
                         Mode mode = Mode::continuous) {
  if (n < 1) throw std::invalid_argument("port: need at least 1 item");
  Rng rng(seed);
  Instance inst;
  inst.n = n;
  inst.seed = seed;
  inst.mode = mode;
  std::int64_t total_cost = 0;
  for (int i = 0; i < n; ++i) {
    int cost = static_cast<int>(rng.uniform_int(0, 100));
    double mu = static_cast<double>(rng.uniform_int(0, 100));
    inst.b.push_back(cost);
    inst.mu.push_back(mu);
    inst.sigma.push_back(rng.uniform_real(0.0, mu));
    inst.gamma.push_back(rng.uniform_real(0.0, mu));
    inst.kappa.push_back(rng.uniform_real(0.0, mu));
    total_cost += cost;
  }
  inst.budget = total_cost / 2;
  return inst;
}

// Weighted 4-moment objective of a selection; the three non-trivial roots are
// floored first in discrete mode. Returns nullopt when the selection exceeds
// the budget.
inline std::optional<double> objective(const Instance& inst,
                                       const std::vector<bool>& selection) {
  if (static_cast<int>(selection.size()) != inst.n)
    throw std::invalid_argument("objective: selection length mismatch");
  std::int64_t cost = 0;
  double s_mu = 0.0, s_sigma2 = 0.0, s_gamma3 = 0.0, s_kappa4 = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    if (!selection[i]) continue;
    cost += inst.b[i];
    s_mu += inst.mu[i];
    s_sigma2 += inst.sigma[i] * inst.sigma[i];
    s_gamma3 += inst.gamma[i] * inst.gamma[i] * inst.gamma[i];
    s_kappa4 += inst.kappa[i] * inst.kappa[i] * inst.kappa[i] * inst.kappa[i];
  }
  if (cost > inst.budget) return std::nullopt;
  double r2 = std::sqrt(s_sigma2);
  double r3 = std::cbrt(s_gamma3);
  double r4 = std::sqrt(std::sqrt(s_kappa4));
  if (inst.mode == Mode::discrete) {
    r2 = std::floor(r2);
    r3 = std::floor(r3);
    r4 = std::floor(r4);
  }
  return inst.lambda[0] * s_mu - inst.lambda[1] * r2 + inst.lambda[2] * r3 -
         inst.lambda[3] * r4;
}

// Accumulated cost plus running moment sums. The sums are carried so the
// final-stage reward is a function of (state, last action), which the
// Bellman recursion and the key-based caches rely on; feasibility still
// depends on the cost alone.
struct State {
  std::int64_t spent = 0;
  double sum_mu = 0.0;
  double sum_sigma2 = 0.0;
  double sum_gamma3 = 0.0;
  double sum_kappa4 = 0.0;
};

class Dp {
 public:
  using State = port::State;

  explicit Dp(const Instance& inst) : inst_(&inst) {
    suffix_mu_.assign(inst.n + 1, 0.0);
    suffix_gamma3_.assign(inst.n + 1, 0.0);
    for (int i = inst.n - 1; i >= 0; --i) {
      suffix_mu_[i] = suffix_mu_[i + 1] + inst.mu[i];
      suffix_gamma3_[i] = suffix_gamma3_[i + 1] +
                          inst.gamma[i] * inst.gamma[i] * inst.gamma[i];
    }
  }

  const Instance& instance() const { return *inst_; }

  int n_stages() const { return inst_->n; }
  int action_count() const { return 2; }

  std::span<const int> control_domain(int) const {
    static constexpr std::array<int, 2> domain{0, 1};
    return domain;
  }

  State initial_state() const { return State{}; }

  bool is_valid(const State& s, int stage, int a) const {
    return s.spent + static_cast<std::int64_t>(a) * inst_->b[stage] <=
           inst_->budget;
  }

  bool is_nondominated(const State&, int, int) const { return true; }

  State transition(const State& s, int stage, int a) const {
    State next = s;
    if (a == 1) {
      next.spent += inst_->b[stage];
      next.sum_mu += inst_->mu[stage];
      next.sum_sigma2 += inst_->sigma[stage] * inst_->sigma[stage];
      next.sum_gamma3 +=
          inst_->gamma[stage] * inst_->gamma[stage] * inst_->gamma[stage];
      next.sum_kappa4 += inst_->kappa[stage] * inst_->kappa[stage] *
                         inst_->kappa[stage] * inst_->kappa[stage];
    }
    return next;
  }

  // Zero until the last stage, where the full objective is collected.
  double reward(const State& s, int stage, int a) const {
    if (stage != inst_->n - 1) return 0.0;
    State fin = transition(s, stage, a);
    return score(fin.sum_mu, fin.sum_sigma2, fin.sum_gamma3, fin.sum_kappa4);
  }

  double terminal_adjustment(const State&) const { return 0.0; }

  double upper_bound() const {
    return completion_bound(State{}, 0);
  }

  // Admissible: the positive terms take every remaining item, the negative
  // terms take none (their sums can only grow, and floors only help).
  double completion_bound(const State& s, int stage) const {
    double best_mu = s.sum_mu + suffix_mu_[stage];
    double best_gamma3 = s.sum_gamma3 + suffix_gamma3_[stage];
    double r2 = std::sqrt(s.sum_sigma2);
    double r3 = std::cbrt(best_gamma3);
    double r4 = std::sqrt(std::sqrt(s.sum_kappa4));
    if (inst_->mode == Mode::discrete) {
      r2 = std::floor(r2);
      r3 = std::floor(r3);
      r4 = std::floor(r4);
    }
    return inst_->lambda[0] * best_mu - inst_->lambda[1] * r2 +
           inst_->lambda[2] * r3 - inst_->lambda[3] * r4;
  }

  double improvement_step() const {
    return inst_->mode == Mode::discrete ? 1.0 : 1e-9;
  }

  void write_key(const State& s, KeyBuilder& kb) const {
    kb.i64(s.spent);
    kb.f64(s.sum_mu);
    kb.f64(s.sum_sigma2);
    kb.f64(s.sum_gamma3);
    kb.f64(s.sum_kappa4);
  }

 private:
  double score(double s_mu, double s_sigma2, double s_gamma3,
               double s_kappa4) const {
    double r2 = std::sqrt(s_sigma2);
    double r3 = std::cbrt(s_gamma3);
    double r4 = std::sqrt(std::sqrt(s_kappa4));
    if (inst_->mode == Mode::discrete) {
      r2 = std::floor(r2);
      r3 = std::floor(r3);
      r4 = std::floor(r4);
    }
    return inst_->lambda[0] * s_mu - inst_->lambda[1] * r2 +
           inst_->lambda[2] * r3 - inst_->lambda[3] * r4;
  }

  const Instance* inst_;
  std::vector<double> suffix_mu_;
  std::vector<double> suffix_gamma3_;
};

static_assert(DpProblem<Dp>);

struct Features {
  // Per item: b, mu, sigma^2, gamma^3, kappa^4 (each over its max possible
  // value), considered flag, current-stage flag, would-exceed flag, and the
  // remaining budget fraction.
  std::vector<std::array<double, 9>> items;
  std::array<bool, 2> mask{false, false};
  int current = 0;  // item considered at this stage
};

inline Features features(const Instance& inst, const State& s, int stage) {
  Features f;
  f.items.resize(inst.n);
  const double max_cost = 100.0, max_mu = 100.0;
  const double budget = static_cast<double>(std::max<std::int64_t>(inst.budget, 1));
  const double remaining =
      static_cast<double>(inst.budget - s.spent) / budget;
  for (int i = 0; i < inst.n; ++i) {
    double sigma2 = inst.sigma[i] * inst.sigma[i];
    double gamma3 = inst.gamma[i] * inst.gamma[i] * inst.gamma[i];
    double kappa4 =
        inst.kappa[i] * inst.kappa[i] * inst.kappa[i] * inst.kappa[i];
    f.items[i] = {inst.b[i] / max_cost,
                  inst.mu[i] / max_mu,
                  sigma2 / (max_mu * max_mu),
                  gamma3 / (max_mu * max_mu * max_mu),
                  kappa4 / (max_mu * max_mu * max_mu * max_mu),
                  i < stage ? 1.0 : 0.0,
                  i == stage ? 1.0 : 0.0,
                  s.spent + inst.b[i] > inst.budget ? 1.0 : 0.0,
                  remaining};
  }
  f.current = stage < inst.n ? stage : inst.n - 1;
  if (stage < inst.n) {
    f.mask[0] = true;
    f.mask[1] = s.spent + inst.b[stage] <= inst.budget;
  }
  return f;
}

}  // namespace dpcp::port
