#pragma once

#include <cassert>
#include <vector>

namespace dpcp::nn {

// Dense row-major matrix of doubles. Row vectors are 1 x c, column vectors
// r x 1; everything the tape moves around is one of these.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

  double& at(int r, int c) {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return a[static_cast<std::size_t>(r) * cols + c];
  }
  double at(int r, int c) const {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return a[static_cast<std::size_t>(r) * cols + c];
  }

  int size() const { return rows * cols; }

  static Mat row(const std::vector<double>& v) {
    Mat m(1, static_cast<int>(v.size()));
    m.a = v;
    return m;
  }

  static Mat col(const std::vector<double>& v) {
    Mat m(static_cast<int>(v.size()), 1);
    m.a = v;
    return m;
  }
};

inline bool same_shape(const Mat& a, const Mat& b) {
  return a.rows == b.rows && a.cols == b.cols;
}

}  // namespace dpcp::nn
