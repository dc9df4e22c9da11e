#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "mcvae/ad/tape.hpp"

namespace mcvae::ad {

// Scalar function under test: builds the output from a differentiable leaf
// holding `point` (shaped 1 x point.size()).
using ScalarFn = std::function<Var(Tape&, Var leaf)>;

struct FdReport {
  Eigen::VectorXd ad_gradient;
  Eigen::VectorXd fd_gradient;
  std::vector<double> rel_errors;  // |ad - fd| / max(1, |ad|, |fd|) per coordinate
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Compares the reverse-mode gradient of f at `point` against central finite
// differences with step h. Passes iff the max relative error (with unit
// absolute floor) is <= tolerance.
FdReport finite_difference_check(const ScalarFn& f, const Eigen::VectorXd& point, double h,
                                 double tolerance);

}  // namespace mcvae::ad
