#pragma once

// Hand-built instances whose optima and intermediate values are worked out
// by hand in the comments; tests freeze those numbers.

#include "dpcp/problems/portfolio.hpp"
#include "dpcp/problems/tsptw.hpp"

namespace fixtures {

// Depot at the origin plus three customers; all pairwise travel times and
// both feasible tours worked out by hand. [1,2,3] costs 148 and is the
// unique optimum, [2,1,3] costs 203, every other order misses a deadline.
inline dpcp::tsptw::Instance tsptw_hand() {
  dpcp::tsptw::Instance inst;
  inst.n = 4;
  inst.coords = {{0, 0}, {10, 10}, {40, 15}, {60, 40}};
  inst.dist = {{0, 14, 43, 72},
               {14, 0, 30, 58},
               {43, 30, 0, 32},
               {72, 58, 32, 0}};
  inst.windows = {{0, 0}, {0, 100}, {30, 80}, {60, 200}};
  inst.seed = 0;
  return inst;
}

// Two items, budget 3. Only {} and {item 0} fit; item 0 scores
// 25 - 5*2 + 5*0 - 5*2 = 5. Both roots that matter are IEEE-exact (sqrt of
// perfect squares, cbrt of zero), so the value is exact in both modes; a
// non-zero cube sum would pick up a runtime-libm ulp on the cube root.
inline dpcp::port::Instance port_exact(dpcp::port::Mode mode) {
  dpcp::port::Instance inst;
  inst.n = 2;
  inst.b = {3, 4};
  inst.mu = {25, 8};
  inst.sigma = {2, 1};
  inst.gamma = {0, 2};
  inst.kappa = {2, 1};
  inst.budget = 3;
  inst.mode = mode;
  return inst;
}

// Two zero-cost items whose combined roots are irrational: sqrt(5), cbrt(2)
// and 2^(1/4). Discrete mode floors them to 2, 1, 1 giving
// 7 - 10 + 5 - 5 = -3; continuous mode keeps the exact value.
inline dpcp::port::Instance port_floors(dpcp::port::Mode mode) {
  dpcp::port::Instance inst;
  inst.n = 2;
  inst.b = {0, 0};
  inst.mu = {3, 4};
  inst.sigma = {1, 2};
  inst.gamma = {1, 1};
  inst.kappa = {1, 1};
  inst.budget = 0;
  inst.mode = mode;
  return inst;
}

}  // namespace fixtures
