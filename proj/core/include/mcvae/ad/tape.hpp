#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

#include "mcvae/util/error.hpp"

namespace mcvae::ad {

using Mat = Eigen::MatrixXd;

class Tape;

// Handle to a node on a tape. Cheap to copy; invalidated by Tape::clear().
class Var {
 public:
  Var() = default;
  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int index() const { return idx_; }
  const Mat& value() const;
  const Mat& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;

 private:
  friend class Tape;
  friend Var emit(Tape& t, Mat value, std::span<const Var> parents,
                  std::function<void(Tape&, int)> back);
  Var(Tape* t, int i) : tape_(t), idx_(i) {}
  Tape* tape_ = nullptr;
  int idx_ = -1;
};

// Reverse-mode trace of matrix-valued primitives. Creation order is the
// topological order; backward() walks it once in reverse. A tape is confined
// to one thread; independent tapes may run concurrently.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var input(Mat value);            // differentiable leaf
  Var constant(Mat value);         // non-differentiable leaf
  Var constant(double value);      // 1x1
  Var zeros(Eigen::Index r, Eigen::Index c);

  // Accumulates d(output)/d(leaf) into every differentiable node's grad.
  // `output` must be 1x1 and only one backward per tape is allowed.
  void backward(const Var& output);

  void clear();
  std::size_t size() const { return nodes_.size(); }
  bool backward_done() const { return backward_done_; }

  const Mat& value_of(int idx) const { return nodes_[static_cast<std::size_t>(idx)].value; }
  const Mat& grad_of(int idx) const;
  bool requires_grad(int idx) const { return nodes_[static_cast<std::size_t>(idx)].req; }

 private:
  friend Var emit(Tape& t, Mat value, std::span<const Var> parents,
                  std::function<void(Tape&, int)> back);

  struct Node {
    Mat value;
    Mat grad;  // empty until backward touches it
    bool req = false;
    std::function<void(Tape&, int)> back;  // (tape, own index)
  };

  Mat& grad_buf(int idx);
  void accum(int idx, const Mat& g);

  friend struct GradSink;
  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

// Access used by op implementations to add gradient contributions.
struct GradSink {
  static void add(Tape& t, int idx, const Mat& g) { t.accum(idx, g); }
};

Var emit(Tape& t, Mat value, std::span<const Var> parents,
         std::function<void(Tape&, int)> back);

// ---- primitive ops -------------------------------------------------------

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var neg(Var a);
Var add_const(Var a, double c);
Var scale_const(Var a, double c);
Var matmul(Var a, Var b);

Var add_row(Var x, Var r);  // x: m x n, r: 1 x n
Var add_col(Var x, Var c);  // c: m x 1
Var sub_col(Var x, Var c);
Var mul_col(Var x, Var c);
Var div_col(Var x, Var c);
Var scale_by(Var x, Var s);  // s: 1 x 1

Var rowwise_dot(Var a, Var b);  // -> m x 1
Var rowwise_sum(Var a);         // -> m x 1
Var sum(Var a);                 // -> 1 x 1
Var mean(Var a);                // -> 1 x 1
Var hcat(std::span<const Var> parts);
Var hcat(std::initializer_list<Var> parts);
Var cols(Var a, int j, int len);
Var rowwise_max_const(Var a);  // -> m x 1 constant (no gradient path)

Var exp(Var a);
Var log(Var a);
Var sqrt(Var a);
Var square(Var a);
Var inv(Var a);
Var sin(Var a);
Var cos(Var a);
Var tanh(Var a);
Var atan(Var a);
Var atanh(Var a);
Var abs(Var a);
Var relu(Var a);
Var softplus(Var a);
Var sigmoid(Var a);
Var clamp(Var a, double lo, double hi);  // zero gradient outside (lo, hi)
Var clamp_min(Var a, double lo);

// Inverse trig with the domain policy: inputs past the domain by more than
// 1e-9 raise DomainError; inside that budget they are clamped, and clamped
// entries propagate zero gradient.
Var acos_clamped(Var a);
Var acosh_clamped(Var a);

// Smooth curvature-trig ratios of q = theta^2 (see scalar_fn.hpp).
Var sin_ratio_sq(Var q, bool circ);
Var cos_sqrt(Var q, bool circ);
Var tan_ratio_sq(Var q, bool circ);
Var atan_ratio_sq(Var q, bool circ);

// ---- composites ----------------------------------------------------------

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator/(Var a, Var b) { return div(a, b); }
inline Var operator-(Var a) { return neg(a); }
inline Var operator+(Var a, double c) { return add_const(a, c); }
inline Var operator+(double c, Var a) { return add_const(a, c); }
inline Var operator-(Var a, double c) { return add_const(a, -c); }
inline Var operator-(double c, Var a) { return add_const(neg(a), c); }
inline Var operator*(Var a, double c) { return scale_const(a, c); }
inline Var operator*(double c, Var a) { return scale_const(a, c); }
inline Var operator/(Var a, double c) { return scale_const(a, 1.0 / c); }

inline Var rowwise_sqnorm(Var a) { return rowwise_dot(a, a); }

// log(sum_j exp(x_ij)) per row, stabilized by the rowwise max.
inline Var logsumexp_cols(Var x) {
  Var m = rowwise_max_const(x);
  return log(rowwise_sum(exp(sub_col(x, m)))) + m;
}

}  // namespace mcvae::ad
