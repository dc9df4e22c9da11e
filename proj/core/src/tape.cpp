#include "mcvae/ad/tape.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "mcvae/ad/scalar_fn.hpp"

namespace mcvae::ad {

namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape() != b.tape()) throw ContractError("ad: operands live on different tapes");
}

void check_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << "ad: " << op << " shape mismatch " << a.rows() << "x" << a.cols() << " vs "
       << b.rows() << "x" << b.cols();
    throw ContractError(os.str());
  }
}

}  // namespace

const Mat& Var::value() const {
  if (!valid()) throw ContractError("ad: use of empty Var");
  return tape_->value_of(idx_);
}

const Mat& Var::grad() const {
  if (!valid()) throw ContractError("ad: use of empty Var");
  return tape_->grad_of(idx_);
}

double Var::scalar() const {
  const Mat& v = value();
  if (v.size() != 1) throw ContractError("ad: scalar() on non-1x1 value");
  return v(0, 0);
}

Var emit(Tape& t, Mat value, std::span<const Var> parents,
         std::function<void(Tape&, int)> back) {
  bool req = false;
  for (const Var& p : parents) {
    if (p.tape() != &t) throw ContractError("ad: operands live on different tapes");
    req = req || t.requires_grad(p.index());
  }
  Tape::Node n;
  n.value = std::move(value);
  n.req = req;
  if (req) n.back = std::move(back);
  t.nodes_.push_back(std::move(n));
  return Var(&t, static_cast<int>(t.nodes_.size()) - 1);
}

Var Tape::input(Mat value) {
  Node n;
  n.value = std::move(value);
  n.req = true;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::constant(Mat value) {
  Node n;
  n.value = std::move(value);
  n.req = false;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::constant(double value) {
  Mat m(1, 1);
  m(0, 0) = value;
  return constant(std::move(m));
}

Var Tape::zeros(Eigen::Index r, Eigen::Index c) { return constant(Mat::Zero(r, c)); }

const Mat& Tape::grad_of(int idx) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  if (n.grad.size() == 0) {
    throw ContractError("ad: gradient not populated (run backward first; node must be reachable)");
  }
  return n.grad;
}

Mat& Tape::grad_buf(int idx) {
  Node& n = nodes_[static_cast<std::size_t>(idx)];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accum(int idx, const Mat& g) {
  if (!nodes_[static_cast<std::size_t>(idx)].req) return;
  grad_buf(idx) += g;
}

void Tape::backward(const Var& output) {
  if (output.tape() != this) throw ContractError("ad: output from another tape");
  if (backward_done_) throw ContractError("ad: second backward on the same record");
  if (output.value().size() != 1) throw ContractError("ad: backward needs a scalar output");
  backward_done_ = true;
  if (!requires_grad(output.index())) return;  // constant graph: nothing to do
  grad_buf(output.index()).setOnes();
  for (int i = output.index(); i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.req || n.grad.size() == 0 || !n.back) continue;
    n.back(*this, i);
  }
  // Unreached differentiable leaves read as zero gradient.
  for (Node& n : nodes_) {
    if (n.req && !n.back && n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  }
}

void Tape::clear() {
  nodes_.clear();
  backward_done_ = false;
}

// ---- arithmetic ------------------------------------------------------------

Var add(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "add");
  std::array<Var, 2> ps{a, b};
  int ai = a.index(), bi = b.index();
  return emit(*a.tape(), a.value() + b.value(), ps, [ai, bi](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    GradSink::add(t, ai, g);
    GradSink::add(t, bi, g);
  });
}

Var sub(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "sub");
  std::array<Var, 2> ps{a, b};
  int ai = a.index(), bi = b.index();
  return emit(*a.tape(), a.value() - b.value(), ps, [ai, bi](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    GradSink::add(t, ai, g);
    GradSink::add(t, bi, -g);
  });
}

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "mul");
  std::array<Var, 2> ps{a, b};
  int ai = a.index(), bi = b.index();
  return emit(*a.tape(), a.value().cwiseProduct(b.value()), ps, [ai, bi](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    GradSink::add(t, ai, g.cwiseProduct(t.value_of(bi)));
    GradSink::add(t, bi, g.cwiseProduct(t.value_of(ai)));
  });
}

Var div(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "div");
  std::array<Var, 2> ps{a, b};
  int ai = a.index(), bi = b.index();
  return emit(*a.tape(), a.value().cwiseQuotient(b.value()), ps, [ai, bi](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    const Mat& out = t.value_of(self);
    const Mat& bv = t.value_of(bi);
    GradSink::add(t, ai, g.cwiseQuotient(bv));
    GradSink::add(t, bi, -g.cwiseProduct(out).cwiseQuotient(bv));
  });
}

Var neg(Var a) { return scale_const(a, -1.0); }

Var add_const(Var a, double c) {
  std::array<Var, 1> ps{a};
  int ai = a.index();
  return emit(*a.tape(), a.value().array() + c,
              ps, [ai](Tape& t, int self) { GradSink::add(t, ai, t.grad_of(self)); });
}

Var scale_const(Var a, double c) {
  std::array<Var, 1> ps{a};
  int ai = a.index();
  return emit(*a.tape(), a.value() * c, ps,
              [ai, c](Tape& t, int self) { GradSink::add(t, ai, c * t.grad_of(self)); });
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  if (a.cols() != b.rows()) throw ContractError("ad: matmul inner dimensions differ");
  std::array<Var, 2> ps{a, b};
  int ai = a.index(), bi = b.index();
  return emit(*a.tape(), a.value() * b.value(), ps, [ai, bi](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    GradSink::add(t, ai, g * t.value_of(bi).transpose());
    GradSink::add(t, bi, t.value_of(ai).transpose() * g);
  });
}

// ---- broadcasts ------------------------------------------------------------

Var add_row(Var x, Var r) {
  check_same_tape(x, r);
  if (r.rows() != 1 || r.cols() != x.cols()) throw ContractError("ad: add_row wants 1 x n");
  std::array<Var, 2> ps{x, r};
  int xi = x.index(), ri = r.index();
  Mat out = x.value();
  out.rowwise() += r.value().row(0);
  return emit(*x.tape(), std::move(out), ps, [xi, ri](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    GradSink::add(t, xi, g);
    GradSink::add(t, ri, g.colwise().sum());
  });
}

namespace {

Var col_broadcast(Var x, Var c, const char* name, double sign) {
  check_same_tape(x, c);
  if (c.cols() != 1 || c.rows() != x.rows()) throw ContractError(std::string("ad: ") + name + " wants m x 1");
  std::array<Var, 2> ps{x, c};
  int xi = x.index(), ci = c.index();
  Mat out = x.value();
  out.colwise() += sign * c.value().col(0);
  return emit(*x.tape(), std::move(out), ps, [xi, ci, sign](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    GradSink::add(t, xi, g);
    GradSink::add(t, ci, sign * g.rowwise().sum());
  });
}

}  // namespace

Var add_col(Var x, Var c) { return col_broadcast(x, c, "add_col", 1.0); }
Var sub_col(Var x, Var c) { return col_broadcast(x, c, "sub_col", -1.0); }

Var mul_col(Var x, Var c) {
  check_same_tape(x, c);
  if (c.cols() != 1 || c.rows() != x.rows()) throw ContractError("ad: mul_col wants m x 1");
  std::array<Var, 2> ps{x, c};
  int xi = x.index(), ci = c.index();
  Mat out = x.value().array().colwise() * c.value().col(0).array();
  return emit(*x.tape(), std::move(out), ps, [xi, ci](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    const Mat& xv = t.value_of(xi);
    const Mat& cv = t.value_of(ci);
    GradSink::add(t, xi, g.array().colwise() * cv.col(0).array());
    GradSink::add(t, ci, g.cwiseProduct(xv).rowwise().sum());
  });
}

Var div_col(Var x, Var c) {
  check_same_tape(x, c);
  if (c.cols() != 1 || c.rows() != x.rows()) throw ContractError("ad: div_col wants m x 1");
  std::array<Var, 2> ps{x, c};
  int xi = x.index(), ci = c.index();
  Mat out = x.value().array().colwise() / c.value().col(0).array();
  return emit(*x.tape(), std::move(out), ps, [xi, ci](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    const Mat& outv = t.value_of(self);
    const Mat& cv = t.value_of(ci);
    GradSink::add(t, xi, g.array().colwise() / cv.col(0).array());
    GradSink::add(t, ci, -(g.cwiseProduct(outv).rowwise().sum().array() / cv.col(0).array()));
  });
}

Var scale_by(Var x, Var s) {
  check_same_tape(x, s);
  if (s.value().size() != 1) throw ContractError("ad: scale_by wants a 1 x 1 scale");
  std::array<Var, 2> ps{x, s};
  int xi = x.index(), si = s.index();
  return emit(*x.tape(), x.value() * s.value()(0, 0), ps, [xi, si](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    double sv = t.value_of(si)(0, 0);
    GradSink::add(t, xi, sv * g);
    Mat gs(1, 1);
    gs(0, 0) = g.cwiseProduct(t.value_of(xi)).sum();
    GradSink::add(t, si, gs);
  });
}

// ---- reductions & reshapes -------------------------------------------------

Var rowwise_dot(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "rowwise_dot");
  std::array<Var, 2> ps{a, b};
  int ai = a.index(), bi = b.index();
  Mat out = a.value().cwiseProduct(b.value()).rowwise().sum();
  return emit(*a.tape(), std::move(out), ps, [ai, bi](Tape& t, int self) {
    const Mat& g = t.grad_of(self);  // m x 1
    GradSink::add(t, ai, t.value_of(bi).array().colwise() * g.col(0).array());
    GradSink::add(t, bi, t.value_of(ai).array().colwise() * g.col(0).array());
  });
}

Var rowwise_sum(Var a) {
  std::array<Var, 1> ps{a};
  int ai = a.index();
  Eigen::Index ncols = a.cols();
  return emit(*a.tape(), a.value().rowwise().sum(), ps, [ai, ncols](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    GradSink::add(t, ai, g.col(0).replicate(1, ncols));
  });
}

Var sum(Var a) {
  std::array<Var, 1> ps{a};
  int ai = a.index();
  Mat out(1, 1);
  out(0, 0) = a.value().sum();
  return emit(*a.tape(), std::move(out), ps, [ai](Tape& t, int self) {
    double g = t.grad_of(self)(0, 0);
    const Mat& av = t.value_of(ai);
    GradSink::add(t, ai, Mat::Constant(av.rows(), av.cols(), g));
  });
}

Var mean(Var a) { return scale_const(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var hcat(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("ad: hcat of nothing");
  Tape& t = *parts[0].tape();
  Eigen::Index m = parts[0].rows(), n = 0;
  for (const Var& p : parts) {
    if (p.rows() != m) throw ContractError("ad: hcat row mismatch");
    n += p.cols();
  }
  Mat out(m, n);
  std::vector<int> idx;
  std::vector<Eigen::Index> widths;
  Eigen::Index off = 0;
  for (const Var& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    idx.push_back(p.index());
    widths.push_back(p.cols());
    off += p.cols();
  }
  return emit(t, std::move(out), parts, [idx, widths](Tape& t2, int self) {
    const Mat& g = t2.grad_of(self);
    Eigen::Index o = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      GradSink::add(t2, idx[k], g.middleCols(o, widths[k]));
      o += widths[k];
    }
  });
}

Var hcat(std::initializer_list<Var> parts) {
  std::vector<Var> v(parts);
  return hcat(std::span<const Var>(v));
}

Var cols(Var a, int j, int len) {
  if (j < 0 || len < 0 || j + len > a.cols()) throw ContractError("ad: cols out of range");
  std::array<Var, 1> ps{a};
  int ai = a.index();
  Eigen::Index nc = a.cols();
  return emit(*a.tape(), a.value().middleCols(j, len), ps, [ai, j, len, nc](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    Mat ga = Mat::Zero(g.rows(), nc);
    ga.middleCols(j, len) = g;
    GradSink::add(t, ai, ga);
  });
}

Var rowwise_max_const(Var a) {
  return a.tape()->constant(Mat(a.value().rowwise().maxCoeff()));
}

// ---- elementwise functions ---------------------------------------------------

namespace {

template <typename F, typename DF>
Var unary(Var a, F f, DF df) {
  std::array<Var, 1> ps{a};
  int ai = a.index();
  Mat out = a.value().unaryExpr(f);
  return emit(*a.tape(), std::move(out), ps, [ai, df](Tape& t, int self) {
    const Mat& g = t.grad_of(self);
    const Mat& av = t.value_of(ai);
    Mat ga(g.rows(), g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j) ga(i, j) = g(i, j) * df(av(i, j));
    GradSink::add(t, ai, ga);
  });
}

}  // namespace

Var exp(Var a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
}

Var log(Var a) {
  return unary(a, [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
}

Var sqrt(Var a) {
  return unary(a, [](double x) { return std::sqrt(x); },
               [](double x) { return 0.5 / std::sqrt(x); });
}

Var square(Var a) {
  return unary(a, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
}

Var inv(Var a) {
  return unary(a, [](double x) { return 1.0 / x; }, [](double x) { return -1.0 / (x * x); });
}

Var sin(Var a) {
  return unary(a, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
}

Var cos(Var a) {
  return unary(a, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double x) {
                 double th = std::tanh(x);
                 return 1.0 - th * th;
               });
}

Var atan(Var a) {
  return unary(a, [](double x) { return std::atan(x); },
               [](double x) { return 1.0 / (1.0 + x * x); });
}

Var atanh(Var a) {
  return unary(a, [](double x) { return std::atanh(x); },
               [](double x) { return 1.0 / (1.0 - x * x); });
}

Var abs(Var a) {
  return unary(a, [](double x) { return std::fabs(x); },
               [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var relu(Var a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var softplus(Var a) {
  return unary(a, [](double x) { return ad::softplus(x); },
               [](double x) { return ad::sigmoid(x); });
}

Var sigmoid(Var a) {
  return unary(a, [](double x) { return ad::sigmoid(x); },
               [](double x) {
                 double s = ad::sigmoid(x);
                 return s * (1.0 - s);
               });
}

Var clamp(Var a, double lo, double hi) {
  return unary(a, [lo, hi](double x) { return std::fmin(std::fmax(x, lo), hi); },
               [lo, hi](double x) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Var clamp_min(Var a, double lo) {
  return unary(a, [lo](double x) { return std::fmax(x, lo); },
               [lo](double x) { return x > lo ? 1.0 : 0.0; });
}

namespace {

constexpr double kDomainEps = 1e-9;   // violations beyond this raise
constexpr double kInnerEps = 1e-15;   // derivative-safe inset from the boundary

void throw_domain(const char* fn, double x) {
  std::ostringstream os;
  os << "ad: " << fn << " argument " << x << " outside domain by more than " << kDomainEps;
  throw DomainError(os.str());
}

}  // namespace

Var acos_clamped(Var a) {
  const Mat& v = a.value();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double x = v(i);
    if (!(x >= -1.0 - kDomainEps && x <= 1.0 + kDomainEps)) throw_domain("acos", x);
  }
  return unary(a,
               [](double x) { return std::acos(std::fmin(std::fmax(x, -1.0 + kInnerEps), 1.0 - kInnerEps)); },
               [](double x) {
                 if (x <= -1.0 + kInnerEps || x >= 1.0 - kInnerEps) return 0.0;
                 return -1.0 / std::sqrt(1.0 - x * x);
               });
}

Var acosh_clamped(Var a) {
  const Mat& v = a.value();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double x = v(i);
    if (!(x >= 1.0 - kDomainEps)) throw_domain("acosh", x);
  }
  return unary(a, [](double x) { return std::acosh(std::fmax(x, 1.0 + kInnerEps)); },
               [](double x) {
                 if (x <= 1.0 + kInnerEps) return 0.0;
                 return 1.0 / std::sqrt(x * x - 1.0);
               });
}

Var sin_ratio_sq(Var q, bool circ) {
  return unary(q, [circ](double x) { return ad::sin_ratio_sq(x, circ); },
               [circ](double x) { return ad::sin_ratio_sq_d(x, circ); });
}

Var cos_sqrt(Var q, bool circ) {
  return unary(q, [circ](double x) { return ad::cos_sqrt(x, circ); },
               [circ](double x) { return ad::cos_sqrt_d(x, circ); });
}

Var tan_ratio_sq(Var q, bool circ) {
  return unary(q, [circ](double x) { return ad::tan_ratio_sq(x, circ); },
               [circ](double x) { return ad::tan_ratio_sq_d(x, circ); });
}

Var atan_ratio_sq(Var q, bool circ) {
  return unary(q, [circ](double x) { return ad::atan_ratio_sq(x, circ); },
               [circ](double x) { return ad::atan_ratio_sq_d(x, circ); });
}

}  // namespace mcvae::ad
