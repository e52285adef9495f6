#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpcp/nn/params.hpp"

namespace dpcp::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moment state is kept per tensor in creation
// order and serializes with the checkpoint so resumed runs continue the
// exact same trajectory.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return t_; }

  // Applies the accumulated gradients and clears them.
  void step(Weights& w) {
    ensure_state(w);
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (int i = 0; i < w.tensor_count(); ++i) {
      Tensor& t = w.tensor(i);
      Mat& m = m_[i];
      Mat& v = v_[i];
      for (int k = 0; k < t.value.size(); ++k) {
        double g = t.grad.a[k];
        m.a[k] = cfg_.beta1 * m.a[k] + (1.0 - cfg_.beta1) * g;
        v.a[k] = cfg_.beta2 * v.a[k] + (1.0 - cfg_.beta2) * g * g;
        t.value.a[k] -=
            cfg_.lr * (m.a[k] / bc1) / (std::sqrt(v.a[k] / bc2) + cfg_.eps);
      }
    }
    w.zero_grads();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["t"] = t_;
    j["m"] = nlohmann::ordered_json::array();
    j["v"] = nlohmann::ordered_json::array();
    for (const Mat& m : m_) j["m"].push_back(m.a);
    for (const Mat& v : v_) j["v"].push_back(v.a);
    return j;
  }

  void restore(const Weights& w, const nlohmann::ordered_json& j) {
    ensure_state(w);
    t_ = j.at("t").get<std::int64_t>();
    const auto& jm = j.at("m");
    const auto& jv = j.at("v");
    // Serialized before the first step: the moments are all zero, which is
    // exactly what ensure_state already built.
    if (t_ == 0 && jm.empty() && jv.empty()) return;
    if (static_cast<int>(jm.size()) != w.tensor_count() ||
        static_cast<int>(jv.size()) != w.tensor_count())
      throw std::invalid_argument("adam restore: tensor count mismatch");
    for (int i = 0; i < w.tensor_count(); ++i) {
      auto mv = jm[i].get<std::vector<double>>();
      auto vv = jv[i].get<std::vector<double>>();
      if (static_cast<int>(mv.size()) != m_[i].size() ||
          static_cast<int>(vv.size()) != v_[i].size())
        throw std::invalid_argument("adam restore: tensor size mismatch");
      m_[i].a = std::move(mv);
      v_[i].a = std::move(vv);
    }
  }

 private:
  void ensure_state(const Weights& w) {
    if (!m_.empty()) {
      if (static_cast<int>(m_.size()) != w.tensor_count())
        throw std::invalid_argument("adam: weights changed shape");
      return;
    }
    for (int i = 0; i < w.tensor_count(); ++i) {
      const Mat& v = w.tensor(i).value;
      m_.emplace_back(v.rows, v.cols);
      v_.emplace_back(v.rows, v.cols);
    }
  }

  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace dpcp::nn
