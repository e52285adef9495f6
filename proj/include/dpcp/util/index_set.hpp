#pragma once

#include <cstdint>
#include <vector>

namespace dpcp {

// Small set of indices in [0, capacity) backed by 64-bit words.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(int capacity)
      : capacity_(capacity), words_((capacity + 63) / 64, 0) {}

  static IndexSet full_range(int capacity, int lo, int hi) {  // [lo, hi)
    IndexSet s(capacity);
    for (int i = lo; i < hi; ++i) s.insert(i);
    return s;
  }

  bool contains(int i) const {
    return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ULL;
  }
  void insert(int i) { words_[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63); }
  void erase(int i) { words_[static_cast<std::size_t>(i) >> 6] &= ~(1ULL << (i & 63)); }

  int count() const {
    int c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  int capacity() const { return capacity_; }

  // Ascending visit of set members.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        int bit = __builtin_ctzll(w);
        f(static_cast<int>(wi * 64) + bit);
        w &= w - 1;
      }
    }
  }

  std::vector<int> to_vector() const {
    std::vector<int> out;
    for_each([&](int i) { out.push_back(i); });
    return out;
  }

  bool operator==(const IndexSet& other) const = default;

 private:
  int capacity_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace dpcp
