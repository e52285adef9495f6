#pragma once

#include <cassert>
#include <vector>

#include "dpcp/nn/network.hpp"
#include "dpcp/util/rng.hpp"

namespace dpcp::train {

// One visited state with the action taken and the shaped return observed
// from that point to the end of its episode. Q regression fits these
// Monte-Carlo targets directly; no bootstrapping.
struct Transition {
  nn::NetInput input;
  int action = 0;
  double target = 0.0;
};

// Fixed-capacity ring buffer; pushes evict the oldest entry once full.
class Replay {
 public:
  explicit Replay(int capacity) : capacity_(capacity) {
    assert(capacity > 0);
    buf_.reserve(capacity);
  }

  int size() const { return static_cast<int>(buf_.size()); }
  int capacity() const { return capacity_; }

  void push(Transition t) {
    if (size() < capacity_) {
      buf_.push_back(std::move(t));
    } else {
      buf_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  // i = 0 is the oldest entry still stored.
  const Transition& at(int i) const {
    assert(i >= 0 && i < size());
    return buf_[(head_ + i) % size()];
  }

  // Uniform with replacement.
  std::vector<int> sample(int count, Rng& rng) const {
    assert(size() > 0);
    std::vector<int> idx(count);
    for (int& i : idx) i = static_cast<int>(rng.below(size()));
    return idx;
  }

 private:
  int capacity_;
  int head_ = 0;  // oldest entry once the buffer has wrapped
  std::vector<Transition> buf_;
};

}  // namespace dpcp::train
