#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpcp/nn/matrix.hpp"

namespace dpcp::nn {

// Named parameter tensor with its gradient accumulator.
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;
};

// Parameter tensors in creation order. The order fixes the flattened layout
// used by the optimizer state, finite-difference checks and checkpoints.
// Addresses are stable, so tapes may hold Tensor pointers across adds.
class Weights {
 public:
  Tensor& add(const std::string& name, int rows, int cols) {
    if (index_.count(name))
      throw std::invalid_argument("duplicate tensor name: " + name);
    auto t = std::make_unique<Tensor>();
    t->name = name;
    t->value = Mat(rows, cols);
    t->grad = Mat(rows, cols);
    index_[name] = static_cast<int>(list_.size());
    list_.push_back(std::move(t));
    return *list_.back();
  }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  Tensor& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end())
      throw std::invalid_argument("unknown tensor name: " + name);
    return *list_[it->second];
  }
  const Tensor& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
      throw std::invalid_argument("unknown tensor name: " + name);
    return *list_[it->second];
  }

  int tensor_count() const { return static_cast<int>(list_.size()); }
  Tensor& tensor(int i) { return *list_[i]; }
  const Tensor& tensor(int i) const { return *list_[i]; }

  int param_count() const {
    int n = 0;
    for (const auto& t : list_) n += t->value.size();
    return n;
  }

  void zero_grads() {
    for (auto& t : list_)
      std::fill(t->grad.a.begin(), t->grad.a.end(), 0.0);
  }

  std::vector<double> flatten() const {
    std::vector<double> out;
    out.reserve(param_count());
    for (const auto& t : list_)
      out.insert(out.end(), t->value.a.begin(), t->value.a.end());
    return out;
  }

  std::vector<double> flatten_grads() const {
    std::vector<double> out;
    out.reserve(param_count());
    for (const auto& t : list_)
      out.insert(out.end(), t->grad.a.begin(), t->grad.a.end());
    return out;
  }

  void unflatten(std::span<const double> flat) {
    if (static_cast<int>(flat.size()) != param_count())
      throw std::invalid_argument("unflatten: size mismatch");
    std::size_t k = 0;
    for (auto& t : list_)
      for (double& v : t->value.a) v = flat[k++];
  }

 private:
  std::vector<std::unique_ptr<Tensor>> list_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace dpcp::nn
