#include "mcvae/ad/fd_check.hpp"

#include <cmath>

namespace mcvae::ad {

namespace {

double eval(const ScalarFn& f, const Eigen::VectorXd& x) {
  Tape t;
  Var leaf = t.constant(Mat(x.transpose()));
  return f(t, leaf).scalar();
}

}  // namespace

FdReport finite_difference_check(const ScalarFn& f, const Eigen::VectorXd& point, double h,
                                 double tolerance) {
  FdReport rep;
  rep.tolerance = tolerance;

  {
    Tape t;
    Var leaf = t.input(Mat(point.transpose()));
    Var out = f(t, leaf);
    t.backward(out);
    rep.ad_gradient = leaf.grad().row(0).transpose();
  }

  const Eigen::Index n = point.size();
  rep.fd_gradient.resize(n);
  rep.rel_errors.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd hi = point, lo = point;
    hi(i) += h;
    lo(i) -= h;
    rep.fd_gradient(i) = (eval(f, hi) - eval(f, lo)) / (2.0 * h);
    double a = rep.ad_gradient(i), d = rep.fd_gradient(i);
    double denom = std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(d)));
    rep.rel_errors[static_cast<std::size_t>(i)] = std::fabs(a - d) / denom;
    rep.max_rel_error = std::fmax(rep.max_rel_error, rep.rel_errors[static_cast<std::size_t>(i)]);
  }
  rep.pass = rep.max_rel_error <= tolerance;
  return rep;
}

}  // namespace mcvae::ad
