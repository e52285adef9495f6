#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "dpcp/nn/matrix.hpp"
#include "dpcp/nn/params.hpp"

namespace dpcp::nn {

// Reverse-mode autodiff over Mat-valued expressions. Values are computed
// eagerly as nodes are appended; backward() replays the tape in reverse and
// accumulates into the bound Tensor grads. One tape = one forward pass.
class Tape {
 public:
  using Id = int;

  Id constant(Mat v) { return push(std::move(v), nullptr, {}); }

  Id param(Tensor& t) {
    Id id = push(t.value, nullptr, {});
    nodes_[id].bound = &t;
    return id;
  }

  const Mat& value(Id id) const { return nodes_[id].value; }
  const Mat& grad(Id id) const { return grads_[id]; }

  // C = A * B
  Id matmul(Id a, Id b) {
    const Mat &A = val(a), &B = val(b);
    check(A.cols == B.rows, "matmul: inner dims");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
      for (int k = 0; k < A.cols; ++k) {
        double av = A.at(i, k);
        if (av == 0.0) continue;
        for (int j = 0; j < B.cols; ++j) C.at(i, j) += av * B.at(k, j);
      }
    return push(std::move(C), [a, b](Tape& t, Id self) {
      const Mat &A = t.val(a), &B = t.val(b), &G = t.grads_[self];
      Mat& dA = t.grads_[a];
      Mat& dB = t.grads_[b];
      for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
          double g = G.at(i, j);
          if (g == 0.0) continue;
          for (int k = 0; k < A.cols; ++k) {
            dA.at(i, k) += g * B.at(k, j);
            dB.at(k, j) += g * A.at(i, k);
          }
        }
    }, {a, b});
  }

  // C = A * B^T
  Id matmul_nt(Id a, Id b) {
    const Mat &A = val(a), &B = val(b);
    check(A.cols == B.cols, "matmul_nt: inner dims");
    Mat C(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i)
      for (int j = 0; j < B.rows; ++j) {
        double s = 0.0;
        for (int k = 0; k < A.cols; ++k) s += A.at(i, k) * B.at(j, k);
        C.at(i, j) = s;
      }
    return push(std::move(C), [a, b](Tape& t, Id self) {
      const Mat &A = t.val(a), &B = t.val(b), &G = t.grads_[self];
      Mat& dA = t.grads_[a];
      Mat& dB = t.grads_[b];
      for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.rows; ++j) {
          double g = G.at(i, j);
          if (g == 0.0) continue;
          for (int k = 0; k < A.cols; ++k) {
            dA.at(i, k) += g * B.at(j, k);
            dB.at(j, k) += g * A.at(i, k);
          }
        }
    }, {a, b});
  }

  Id add(Id a, Id b) {
    const Mat &A = val(a), &B = val(b);
    check(same_shape(A, B), "add: shape");
    Mat C = A;
    for (int i = 0; i < C.size(); ++i) C.a[i] += B.a[i];
    return push(std::move(C), [a, b](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i) {
        t.grads_[a].a[i] += G.a[i];
        t.grads_[b].a[i] += G.a[i];
      }
    }, {a, b});
  }

  Id sub(Id a, Id b) {
    const Mat &A = val(a), &B = val(b);
    check(same_shape(A, B), "sub: shape");
    Mat C = A;
    for (int i = 0; i < C.size(); ++i) C.a[i] -= B.a[i];
    return push(std::move(C), [a, b](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i) {
        t.grads_[a].a[i] += G.a[i];
        t.grads_[b].a[i] -= G.a[i];
      }
    }, {a, b});
  }

  Id mul(Id a, Id b) {
    const Mat &A = val(a), &B = val(b);
    check(same_shape(A, B), "mul: shape");
    Mat C = A;
    for (int i = 0; i < C.size(); ++i) C.a[i] *= B.a[i];
    return push(std::move(C), [a, b](Tape& t, Id self) {
      const Mat &A = t.val(a), &B = t.val(b), &G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i) {
        t.grads_[a].a[i] += G.a[i] * B.a[i];
        t.grads_[b].a[i] += G.a[i] * A.a[i];
      }
    }, {a, b});
  }

  // C = A + row broadcast over every row of A.
  Id add_rowvec(Id a, Id r) {
    const Mat &A = val(a), &R = val(r);
    check(R.rows == 1 && R.cols == A.cols, "add_rowvec: shape");
    Mat C = A;
    for (int i = 0; i < A.rows; ++i)
      for (int j = 0; j < A.cols; ++j) C.at(i, j) += R.at(0, j);
    return push(std::move(C), [a, r](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      Mat& dA = t.grads_[a];
      Mat& dR = t.grads_[r];
      for (int i = 0; i < G.rows; ++i)
        for (int j = 0; j < G.cols; ++j) {
          dA.at(i, j) += G.at(i, j);
          dR.at(0, j) += G.at(i, j);
        }
    }, {a, r});
  }

  Id scale(Id a, double c) {
    Mat C = val(a);
    for (double& v : C.a) v *= c;
    return push(std::move(C), [a, c](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i) t.grads_[a].a[i] += c * G.a[i];
    }, {a});
  }

  Id addc(Id a, double c) {
    Mat C = val(a);
    for (double& v : C.a) v += c;
    return push(std::move(C), [a](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i) t.grads_[a].a[i] += G.a[i];
    }, {a});
  }

  // C = s * A with a 1x1 node as the scalar.
  Id scale_node(Id a, Id s) {
    const Mat& A = val(a);
    const Mat& S = val(s);
    check(S.rows == 1 && S.cols == 1, "scale_node: scalar");
    Mat C = A;
    for (double& v : C.a) v *= S.a[0];
    return push(std::move(C), [a, s](Tape& t, Id self) {
      const Mat &A = t.val(a), &G = t.grads_[self];
      double sv = t.val(s).a[0];
      double acc = 0.0;
      for (int i = 0; i < G.size(); ++i) {
        t.grads_[a].a[i] += sv * G.a[i];
        acc += G.a[i] * A.a[i];
      }
      t.grads_[s].a[0] += acc;
    }, {a, s});
  }

  Id tanh_(Id a) {
    Mat C = val(a);
    for (double& v : C.a) v = std::tanh(v);
    return push(std::move(C), [a](Tape& t, Id self) {
      const Mat &C = t.val(self), &G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i)
        t.grads_[a].a[i] += G.a[i] * (1.0 - C.a[i] * C.a[i]);
    }, {a});
  }

  Id exp_(Id a) {
    Mat C = val(a);
    for (double& v : C.a) v = std::exp(v);
    return push(std::move(C), [a](Tape& t, Id self) {
      const Mat &C = t.val(self), &G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i) t.grads_[a].a[i] += G.a[i] * C.a[i];
    }, {a});
  }

  Id log_(Id a) {
    Mat C = val(a);
    for (double& v : C.a) v = std::log(v);
    return push(std::move(C), [a](Tape& t, Id self) {
      const Mat &A = t.val(a), &G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i) t.grads_[a].a[i] += G.a[i] / A.a[i];
    }, {a});
  }

  Id square(Id a) {
    Mat C = val(a);
    for (double& v : C.a) v *= v;
    return push(std::move(C), [a](Tape& t, Id self) {
      const Mat &A = t.val(a), &G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i)
        t.grads_[a].a[i] += 2.0 * A.a[i] * G.a[i];
    }, {a});
  }

  // Elementwise min; ties route the gradient to the first argument.
  Id min2(Id a, Id b) {
    const Mat &A = val(a), &B = val(b);
    check(same_shape(A, B), "min2: shape");
    Mat C = A;
    for (int i = 0; i < C.size(); ++i) C.a[i] = std::min(A.a[i], B.a[i]);
    return push(std::move(C), [a, b](Tape& t, Id self) {
      const Mat &A = t.val(a), &B = t.val(b), &G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i) {
        if (A.a[i] <= B.a[i])
          t.grads_[a].a[i] += G.a[i];
        else
          t.grads_[b].a[i] += G.a[i];
      }
    }, {a, b});
  }

  // Clamp to [lo, hi]; zero gradient outside the open interval.
  Id clamp(Id a, double lo, double hi) {
    const Mat& A = val(a);
    Mat C = A;
    for (double& v : C.a) v = std::min(std::max(v, lo), hi);
    return push(std::move(C), [a, lo, hi](Tape& t, Id self) {
      const Mat &A = t.val(a), &G = t.grads_[self];
      for (int i = 0; i < G.size(); ++i)
        if (A.a[i] > lo && A.a[i] < hi) t.grads_[a].a[i] += G.a[i];
    }, {a});
  }

  // Row-wise softmax with temperature; no masking.
  Id softmax_rows(Id a, double temp = 1.0) {
    const Mat& A = val(a);
    Mat C(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i) {
      double m = A.at(i, 0);
      for (int j = 1; j < A.cols; ++j) m = std::max(m, A.at(i, j));
      double z = 0.0;
      for (int j = 0; j < A.cols; ++j) {
        double e = std::exp((A.at(i, j) - m) / temp);
        C.at(i, j) = e;
        z += e;
      }
      for (int j = 0; j < A.cols; ++j) C.at(i, j) /= z;
    }
    return push(std::move(C), [a, temp](Tape& t, Id self) {
      const Mat &P = t.val(self), &G = t.grads_[self];
      Mat& dA = t.grads_[a];
      for (int i = 0; i < P.rows; ++i) {
        double dot = 0.0;
        for (int j = 0; j < P.cols; ++j) dot += G.at(i, j) * P.at(i, j);
        for (int j = 0; j < P.cols; ++j)
          dA.at(i, j) += P.at(i, j) * (G.at(i, j) - dot) / temp;
      }
    }, {a});
  }

  // Softmax over the unmasked entries of a single row; masked entries are
  // exactly zero in the output and receive no gradient. Throws if the mask
  // admits nothing.
  Id masked_softmax_row(Id a, const std::vector<bool>& mask,
                        double temp = 1.0) {
    const Mat& A = val(a);
    check(A.rows == 1 && static_cast<int>(mask.size()) == A.cols,
          "masked_softmax_row: shape");
    bool any = false;
    double m = 0.0;
    for (int j = 0; j < A.cols; ++j)
      if (mask[j]) {
        m = any ? std::max(m, A.at(0, j)) : A.at(0, j);
        any = true;
      }
    if (!any)
      throw std::invalid_argument("masked_softmax_row: empty mask");
    Mat C(1, A.cols, 0.0);
    double z = 0.0;
    for (int j = 0; j < A.cols; ++j)
      if (mask[j]) {
        double e = std::exp((A.at(0, j) - m) / temp);
        C.at(0, j) = e;
        z += e;
      }
    for (int j = 0; j < A.cols; ++j)
      if (mask[j]) C.at(0, j) /= z;
    return push(std::move(C), [a, mask, temp](Tape& t, Id self) {
      const Mat &P = t.val(self), &G = t.grads_[self];
      Mat& dA = t.grads_[a];
      double dot = 0.0;
      for (int j = 0; j < P.cols; ++j)
        if (mask[j]) dot += G.at(0, j) * P.at(0, j);
      for (int j = 0; j < P.cols; ++j)
        if (mask[j]) dA.at(0, j) += P.at(0, j) * (G.at(0, j) - dot) / temp;
    }, {a});
  }

  // Entropy of a masked probability row: -sum p log p over unmasked entries
  // with positive probability.
  Id entropy_row(Id probs, const std::vector<bool>& mask) {
    const Mat& P = val(probs);
    check(P.rows == 1 && static_cast<int>(mask.size()) == P.cols,
          "entropy_row: shape");
    double h = 0.0;
    for (int j = 0; j < P.cols; ++j)
      if (mask[j] && P.at(0, j) > 0.0) h -= P.at(0, j) * std::log(P.at(0, j));
    Mat C(1, 1);
    C.a[0] = h;
    return push(std::move(C), [probs, mask](Tape& t, Id self) {
      const Mat& P = t.val(probs);
      double g = t.grads_[self].a[0];
      for (int j = 0; j < P.cols; ++j)
        if (mask[j] && P.at(0, j) > 0.0)
          t.grads_[probs].at(0, j) -= g * (std::log(P.at(0, j)) + 1.0);
    }, {probs});
  }

  // Column-wise max over rows -> 1 x cols; gradient goes to the first
  // attaining row of each column.
  Id max_pool_rows(Id a) {
    const Mat& A = val(a);
    Mat C(1, A.cols);
    for (int j = 0; j < A.cols; ++j) {
      double m = A.at(0, j);
      for (int i = 1; i < A.rows; ++i) m = std::max(m, A.at(i, j));
      C.at(0, j) = m;
    }
    return push(std::move(C), [a](Tape& t, Id self) {
      const Mat &A = t.val(a), &C = t.val(self), &G = t.grads_[self];
      Mat& dA = t.grads_[a];
      for (int j = 0; j < A.cols; ++j) {
        for (int i = 0; i < A.rows; ++i)
          if (A.at(i, j) == C.at(0, j)) {
            dA.at(i, j) += G.at(0, j);
            break;
          }
      }
    }, {a});
  }

  Id mean_pool_rows(Id a) {
    const Mat& A = val(a);
    Mat C(1, A.cols);
    for (int j = 0; j < A.cols; ++j) {
      double s = 0.0;
      for (int i = 0; i < A.rows; ++i) s += A.at(i, j);
      C.at(0, j) = s / A.rows;
    }
    return push(std::move(C), [a](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      Mat& dA = t.grads_[a];
      for (int j = 0; j < G.cols; ++j)
        for (int i = 0; i < dA.rows; ++i)
          dA.at(i, j) += G.at(0, j) / dA.rows;
    }, {a});
  }

  Id concat_cols(Id a, Id b) {
    const Mat &A = val(a), &B = val(b);
    check(A.rows == B.rows, "concat_cols: rows");
    Mat C(A.rows, A.cols + B.cols);
    for (int i = 0; i < A.rows; ++i) {
      for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(i, j);
      for (int j = 0; j < B.cols; ++j) C.at(i, A.cols + j) = B.at(i, j);
    }
    return push(std::move(C), [a, b](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      Mat& dA = t.grads_[a];
      Mat& dB = t.grads_[b];
      for (int i = 0; i < G.rows; ++i) {
        for (int j = 0; j < dA.cols; ++j) dA.at(i, j) += G.at(i, j);
        for (int j = 0; j < dB.cols; ++j)
          dB.at(i, j) += G.at(i, dA.cols + j);
      }
    }, {a, b});
  }

  Id gather_row(Id a, int r) {
    const Mat& A = val(a);
    check(r >= 0 && r < A.rows, "gather_row: index");
    Mat C(1, A.cols);
    for (int j = 0; j < A.cols; ++j) C.at(0, j) = A.at(r, j);
    return push(std::move(C), [a, r](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      for (int j = 0; j < G.cols; ++j) t.grads_[a].at(r, j) += G.at(0, j);
    }, {a});
  }

  Id pick(Id a, int r, int c) {
    const Mat& A = val(a);
    check(r >= 0 && r < A.rows && c >= 0 && c < A.cols, "pick: index");
    Mat C(1, 1);
    C.a[0] = A.at(r, c);
    return push(std::move(C), [a, r, c](Tape& t, Id self) {
      t.grads_[a].at(r, c) += t.grads_[self].a[0];
    }, {a});
  }

  Id sum(Id a) {
    const Mat& A = val(a);
    Mat C(1, 1);
    for (double v : A.a) C.a[0] += v;
    return push(std::move(C), [a](Tape& t, Id self) {
      double g = t.grads_[self].a[0];
      for (double& v : t.grads_[a].a) v += g;
    }, {a});
  }

  // 1 x n row assembled from 1x1 nodes.
  Id stack_scalars(const std::vector<Id>& ids) {
    Mat C(1, static_cast<int>(ids.size()));
    for (std::size_t j = 0; j < ids.size(); ++j) {
      check(val(ids[j]).size() == 1, "stack_scalars: non-scalar");
      C.at(0, static_cast<int>(j)) = val(ids[j]).a[0];
    }
    return push(std::move(C), [ids](Tape& t, Id self) {
      const Mat& G = t.grads_[self];
      for (std::size_t j = 0; j < ids.size(); ++j)
        t.grads_[ids[j]].a[0] += G.at(0, static_cast<int>(j));
    }, ids);
  }

  // Seeds d(root)/d(root) = 1 and accumulates parameter gradients into the
  // bound tensors. Root must be scalar.
  void backward(Id root) {
    check(val(root).size() == 1, "backward: root must be 1x1");
    grads_.clear();
    grads_.reserve(nodes_.size());
    for (const auto& n : nodes_)
      grads_.emplace_back(n.value.rows, n.value.cols);
    grads_[root].a[0] = 1.0;
    for (Id id = root; id >= 0; --id) {
      if (nodes_[id].back) nodes_[id].back(*this, id);
      if (nodes_[id].bound) {
        const Mat& g = grads_[id];
        Mat& dst = nodes_[id].bound->grad;
        for (int i = 0; i < g.size(); ++i) dst.a[i] += g.a[i];
      }
    }
  }

  int node_count() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Mat value;
    std::function<void(Tape&, Id)> back;
    Tensor* bound = nullptr;
  };

  const Mat& val(Id id) const { return nodes_[id].value; }

  static void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  }

  Id push(Mat value, std::function<void(Tape&, Id)> back,
          const std::vector<Id>& inputs) {
    for (Id in : inputs)
      check(in >= 0 && in < static_cast<Id>(nodes_.size()),
            "tape: input id out of range");
    nodes_.push_back(Node{std::move(value), std::move(back), nullptr});
    return static_cast<Id>(nodes_.size()) - 1;
  }

  std::vector<Node> nodes_;
  std::vector<Mat> grads_;
};

}  // namespace dpcp::nn
