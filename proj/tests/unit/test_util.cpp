#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dpcp/util/index_set.hpp"
#include "dpcp/util/key.hpp"
#include "dpcp/util/rng.hpp"

using dpcp::IndexSet;
using dpcp::KeyBuilder;
using dpcp::Rng;

TEST(SeedDerivation, DeterministicAndStreamSeparated) {
  EXPECT_EQ(dpcp::mix_seed(42), dpcp::mix_seed(42));
  EXPECT_NE(dpcp::mix_seed(42), dpcp::mix_seed(43));
  EXPECT_EQ(dpcp::derive_seed(7, 3), dpcp::derive_seed(7, 3));
  EXPECT_NE(dpcp::derive_seed(7, 3), dpcp::derive_seed(7, 4));
  EXPECT_NE(dpcp::derive_seed(7, 3), dpcp::derive_seed(8, 3));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(rng.below(7), 7u);
}

TEST(Rng, UniformIntCoversInclusiveRange) {
  Rng rng(9);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    auto v = rng.uniform_int(-2, 2);
    EXPECT_GE(v, -2);
    EXPECT_LE(v, 2);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(Rng, Real01HalfOpen) {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    double r = rng.real01();
    EXPECT_GE(r, 0.0);
    EXPECT_LT(r, 1.0);
  }
}

TEST(Rng, ShuffleIsDeterministicPermutation) {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<int> w = v;
  Rng a(77), b(77);
  a.shuffle(v);
  b.shuffle(w);
  EXPECT_EQ(v, w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(Rng, WeightedIndexSkipsZeroWeights) {
  Rng rng(13);
  std::vector<double> weights{0.0, 3.0, 0.0, 1.0};
  int count1 = 0, count3 = 0;
  for (int i = 0; i < 10000; ++i) {
    auto idx = rng.weighted_index(weights);
    ASSERT_TRUE(idx == 1 || idx == 3);
    (idx == 1 ? count1 : count3)++;
  }
  // Expected ratio 3:1; allow a generous band.
  double frac = static_cast<double>(count1) / 10000.0;
  EXPECT_GT(frac, 0.70);
  EXPECT_LT(frac, 0.80);
}

TEST(KeyBuilder, BigEndianLayout) {
  KeyBuilder kb;
  kb.u32(0x01020304u);
  EXPECT_EQ(kb.bytes(), std::string("\x01\x02\x03\x04", 4));

  KeyBuilder kb2;
  kb2.u16(0x0102u);
  kb2.u8(0xffu);
  EXPECT_EQ(kb2.bytes(), std::string("\x01\x02\xff", 3));
}

TEST(KeyBuilder, SignedAndFloatEncodings) {
  KeyBuilder kb;
  kb.i64(-1);
  EXPECT_EQ(kb.bytes(), std::string(8, '\xff'));

  KeyBuilder kf;
  kf.f64(1.0);
  EXPECT_EQ(kf.bytes(), std::string("\x3f\xf0\x00\x00\x00\x00\x00\x00", 8));
}

TEST(KeyBuilder, TakeMovesOutBuffer) {
  KeyBuilder kb;
  kb.u8(0x42);
  std::string got = kb.take();
  EXPECT_EQ(got, std::string("\x42", 1));
}

TEST(IndexSet, FullRangeIsHalfOpen) {
  IndexSet s = IndexSet::full_range(10, 1, 10);
  EXPECT_FALSE(s.contains(0));
  for (int i = 1; i < 10; ++i) EXPECT_TRUE(s.contains(i));
  EXPECT_EQ(s.count(), 9);
}

TEST(IndexSet, InsertEraseCount) {
  IndexSet s(130);  // spans three words
  EXPECT_TRUE(s.empty());
  s.insert(0);
  s.insert(63);
  s.insert(64);
  s.insert(129);
  EXPECT_EQ(s.count(), 4);
  EXPECT_TRUE(s.contains(64));
  s.erase(64);
  EXPECT_FALSE(s.contains(64));
  EXPECT_EQ(s.count(), 3);
}

TEST(IndexSet, ForEachAscending) {
  IndexSet s(100);
  for (int i : {70, 3, 99, 0, 65}) s.insert(i);
  EXPECT_EQ(s.to_vector(), (std::vector<int>{0, 3, 65, 70, 99}));
}

TEST(IndexSet, EqualityIsStructural) {
  IndexSet a(20), b(20);
  a.insert(5);
  b.insert(5);
  EXPECT_EQ(a, b);
  b.insert(6);
  EXPECT_FALSE(a == b);
}
