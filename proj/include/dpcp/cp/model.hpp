#pragma once

#include <limits>
#include <vector>

#include "dpcp/dp/problem.hpp"

namespace dpcp::cp {

// Domain filters applied at every decision variable. Each one is a pure
// per-value predicate, so the pruned domain is their intersection and one
// pass over any ordering already reaches the propagation fixed point; the
// ordering is kept as a parameter to make that claim testable.
enum class Filter { validity, dominance, bound };

inline std::vector<Filter> default_filters() {
  return {Filter::validity, Filter::dominance, Filter::bound};
}

template <DpProblem P>
class CpModel {
 public:
  explicit CpModel(const P& p, std::vector<Filter> order = default_filters())
      : p_(&p), order_(std::move(order)) {}

  // Remaining domain of the stage's decision variable given the prefix
  // value. `incumbent` of -inf disables the objective cut; otherwise the
  // cut demands an optimistic completion of at least incumbent +
  // improvement_step, which is what makes exhaustion a proof.
  std::vector<int> prune(const typename P::State& s, int stage,
                         double value_so_far, double incumbent) const {
    std::vector<int> dom;
    for (int v : p_->control_domain(stage)) dom.push_back(v);
    for (Filter f : order_) {
      std::vector<int> kept;
      for (int v : dom)
        if (keeps(f, s, stage, value_so_far, incumbent, v)) kept.push_back(v);
      dom = std::move(kept);
    }
    return dom;
  }

  const P& problem() const { return *p_; }

 private:
  bool keeps(Filter f, const typename P::State& s, int stage,
             double value_so_far, double incumbent, int v) const {
    switch (f) {
      case Filter::validity:
        return p_->is_valid(s, stage, v);
      case Filter::dominance:
        return p_->is_nondominated(s, stage, v);
      case Filter::bound: {
        if (incumbent == -std::numeric_limits<double>::infinity()) return true;
        // Invalid values cannot be transitioned; leave them to the validity
        // filter so the filters commute.
        if (!p_->is_valid(s, stage, v)) return true;
        double optimistic = value_so_far + p_->reward(s, stage, v) +
                            p_->completion_bound(p_->transition(s, stage, v),
                                                 stage + 1);
        return optimistic >= incumbent + p_->improvement_step();
      }
    }
    return true;
  }

  const P* p_;
  std::vector<Filter> order_;
};

}  // namespace dpcp::cp
