#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dpcp::cp {

// Memoizes one prediction row per search state. Identical states reached
// along different branches reuse the stored row, so caching can only change
// speed, never which value ordering the search sees.
class PredictionCache {
 public:
  template <typename Compute>
  const std::vector<double>& get(std::string key, Compute&& compute) {
    auto it = map_.find(key);
    if (it != map_.end()) {
      ++hits_;
      return it->second;
    }
    ++misses_;
    return map_.emplace(std::move(key), compute()).first->second;
  }

  std::int64_t hits() const { return hits_; }
  std::int64_t misses() const { return misses_; }
  std::int64_t size() const { return static_cast<std::int64_t>(map_.size()); }

  void clear() {
    map_.clear();
    hits_ = 0;
    misses_ = 0;
  }

 private:
  std::unordered_map<std::string, std::vector<double>> map_;
  std::int64_t hits_ = 0;
  std::int64_t misses_ = 0;
};

}  // namespace dpcp::cp
