#include "mcvae/geom/batch.hpp"

#include <cmath>
#include <sstream>

namespace mcvae::geom {

using ad::Var;
using ad::hcat;

Model model_from_tag(char c) {
  switch (c) {
    case 'e': return Model::E;
    case 'h': return Model::H;
    case 's': return Model::S;
    case 'p': return Model::P;
    case 'd': return Model::D;
    case 'u': return Model::U;
    default: break;
  }
  throw ContractError(std::string("unknown model tag '") + c + "'");
}

void validate_curvature(Model m, double k) {
  if (!std::isfinite(k)) throw DomainError("curvature must be finite");
  switch (m) {
    case Model::E:
      if (!is_flat(k)) throw ContractError("E requires K = 0");
      break;
    case Model::H:
      if (!(k <= -kFlatTau))
        throw ContractError("H requires K < 0 (|K| >= 1e-7; points diverge as K -> 0)");
      break;
    case Model::S:
      if (!(k >= kFlatTau))
        throw ContractError("S requires K > 0 (|K| >= 1e-7; points diverge as K -> 0)");
      break;
    case Model::P:
      if (!(k < 0.0)) throw ContractError("P requires K < 0");
      break;
    case Model::D:
      if (!(k > 0.0)) throw ContractError("D requires K > 0");
      break;
    case Model::U:
      break;
  }
}

Model effective_model(Model m, double k) {
  validate_curvature(m, k);
  if (m != Model::U) return m;
  if (is_flat(k)) return Model::E;
  return k > 0.0 ? Model::D : Model::P;
}

namespace {

void check_finite(double x) {
  if (!std::isfinite(x)) throw DomainError("curv_trig: non-finite argument");
}

void check_curved(double k) {
  if (is_flat(k)) throw ContractError("curv_trig: flat curvature; use the Euclidean branch");
}

}  // namespace

double curv_sin(double k, double x) {
  check_finite(x);
  check_curved(k);
  return k > 0.0 ? std::sin(x) : std::sinh(x);
}

double curv_cos(double k, double x) {
  check_finite(x);
  check_curved(k);
  return k > 0.0 ? std::cos(x) : std::cosh(x);
}

double curv_tan(double k, double x) {
  check_finite(x);
  check_curved(k);
  return k > 0.0 ? std::tan(x) : std::tanh(x);
}

double curv_atan(double k, double x) {
  check_finite(x);
  check_curved(k);
  return k > 0.0 ? std::atan(x) : std::atanh(x);
}

double curv_acos(double k, double x) {
  check_finite(x);
  check_curved(k);
  if (k > 0.0) {
    if (!(x >= -1.0 - 1e-9 && x <= 1.0 + 1e-9)) {
      std::ostringstream os;
      os << "curv_acos: argument " << x << " outside [-1,1] by more than 1e-9";
      throw DomainError(os.str());
    }
    return std::acos(std::fmin(std::fmax(x, -1.0), 1.0));
  }
  if (!(x >= 1.0 - 1e-9)) {
    std::ostringstream os;
    os << "curv_acos: argument " << x << " below 1 by more than 1e-9 (hyperbolic branch)";
    throw DomainError(os.str());
  }
  return std::acosh(std::fmax(x, 1.0));
}

// ---- batch ops -------------------------------------------------------------

Var lorentz_dot(Var a, Var b) {
  Var d = rowwise_dot(a, b);
  Var t = mul(cols(a, 0, 1), cols(b, 0, 1));
  return d - scale_const(t, 2.0);
}

BatchGeometry::BatchGeometry(Model model, Var k, int dim)
    : model_(model), k_(k), dim_(dim) {
  if (model == Model::U) throw ContractError("BatchGeometry wants a resolved model, not U");
  validate_curvature(model, k.scalar());
  ambient_ = dim + ((model == Model::H || model == Model::S) ? 1 : 0);
}

Var BatchGeometry::abs_k() const { return ad::abs(k_); }

Var BatchGeometry::radius() const { return inv(ad::sqrt(abs_k())); }

Var BatchGeometry::origin(Eigen::Index m) const {
  ad::Tape& t = *k_.tape();
  if (flat() || projected()) return t.zeros(m, dim_);
  Var ones = t.constant(ad::Mat::Ones(m, 1));
  return hcat({scale_by(ones, radius()), t.zeros(m, dim_)});
}

Var BatchGeometry::lift(Var v) const {
  if (ambient_ == dim_) return v;
  return hcat({v.tape()->zeros(v.rows(), 1), v});
}

Var BatchGeometry::drop(Var v) const {
  if (ambient_ == dim_) return v;
  return cols(v, 1, dim_);
}

Var BatchGeometry::kdot(Var a, Var b) const {
  return model_ == Model::H ? lorentz_dot(a, b) : rowwise_dot(a, b);
}

Var BatchGeometry::lambda(Var x) const {
  if (model_ == Model::H || model_ == Model::S)
    throw ContractError("conformal factor is defined in projected/Euclidean models only");
  return scale_const(inv(add_const(scale_by(rowwise_sqnorm(x), k_), 1.0)), 2.0);
}

Var BatchGeometry::inner(Var x, Var u, Var v) const {
  switch (model_) {
    case Model::E: return rowwise_dot(u, v);
    case Model::H: return lorentz_dot(u, v);
    case Model::S: return rowwise_dot(u, v);
    default: return mul(square(lambda(x)), rowwise_dot(u, v));
  }
}

Var BatchGeometry::exp_origin(Var v) const {
  if (flat()) return v;
  Var q = scale_by(clamp_min(rowwise_sqnorm(v), 0.0), abs_k());
  if (projected()) return mul_col(v, tan_ratio_sq(q, circular()));
  // x = mu0: cos_K(theta) mu0 + sin_K(theta)/theta * v
  return hcat({scale_by(cos_sqrt(q, circular()), radius()),
               mul_col(v, sin_ratio_sq(q, circular()))});
}

Var BatchGeometry::log_origin(Var y) const {
  if (flat()) return y;
  if (projected()) {
    Var q = scale_by(rowwise_sqnorm(y), abs_k());
    return mul_col(y, atan_ratio_sq(q, circular()));
  }
  return drop(log(origin(y.rows()), y));
}

Var BatchGeometry::exp(Var x, Var v) const {
  if (flat()) return add(x, v);
  if (projected()) {
    // x (+) tan_K(sqrt|K| lambda_x |v| / 2) v / (sqrt|K| |v|)
    Var lam = lambda(x);
    Var q = scale_by(scale_const(mul(square(lam), rowwise_sqnorm(v)), 0.25), abs_k());
    Var step = mul_col(mul_col(v, tan_ratio_sq(q, circular())), scale_const(lam, 0.5));
    return mobius_add(x, step);
  }
  Var q = scale_by(clamp_min(kdot(v, v), 0.0), abs_k());
  return add(mul_col(x, cos_sqrt(q, circular())), mul_col(v, sin_ratio_sq(q, circular())));
}

Var BatchGeometry::log(Var x, Var y) const {
  if (flat()) return sub(y, x);
  if (projected()) {
    Var w = mobius_add(neg(x), y);
    Var q = scale_by(rowwise_sqnorm(w), abs_k());
    Var coeff = mul(atan_ratio_sq(q, circular()), inv(scale_const(lambda(x), 0.5)));
    return mul_col(w, coeff);
  }
  Var alpha = scale_by(kdot(x, y), k_);
  if (circular()) {
    // guard the antipodal cut: log is undefined at alpha = -1
    const ad::Mat& av = alpha.value();
    for (Eigen::Index i = 0; i < av.rows(); ++i) {
      if (av(i, 0) < -1.0 + 1e-9)
        throw DomainError("log_map: antipodal points on S/D have no unique geodesic");
    }
  }
  Var theta = circular() ? acos_clamped(alpha) : acosh_clamped(alpha);
  Var coeff = inv(sin_ratio_sq(square(theta), circular()));
  return mul_col(sub(y, mul_col(x, alpha)), coeff);
}

Var BatchGeometry::pt(Var x, Var y, Var v) const {
  if (flat()) return v;
  if (projected()) {
    Var ratio = mul(lambda(x), inv(lambda(y)));
    return mul_col(gyration(y, neg(x), v), ratio);
  }
  // v - K<y,v>/(1 + K<x,y>) (x + y)
  Var num = scale_by(kdot(y, v), k_);
  Var den = add_const(scale_by(kdot(x, y), k_), 1.0);
  return sub(v, mul_col(add(x, y), mul(num, inv(den))));
}

Var BatchGeometry::pt_from_origin(Var y, Var v) const {
  if (flat()) return v;
  if (projected()) return mul_col(v, scale_const(inv(lambda(y)), 2.0));
  return pt(origin(y.rows()), y, v);
}

Var BatchGeometry::pt_to_origin(Var x, Var v) const {
  if (flat()) return v;
  if (projected()) return mul_col(v, scale_const(lambda(x), 0.5));
  return pt(x, origin(x.rows()), v);
}

Var BatchGeometry::distance(Var x, Var y) const {
  if (flat()) return ad::sqrt(clamp_min(rowwise_sqnorm(sub(y, x)), 0.0));
  Var arg;
  if (projected()) {
    Var dx = rowwise_sqnorm(sub(x, y));
    Var cx = add_const(scale_by(rowwise_sqnorm(x), k_), 1.0);
    Var cy = add_const(scale_by(rowwise_sqnorm(y), k_), 1.0);
    arg = add_const(neg(scale_const(scale_by(mul(dx, inv(mul(cx, cy))), k_), 2.0)), 1.0);
  } else {
    arg = scale_by(kdot(x, y), k_);
  }
  Var theta = circular() ? acos_clamped(arg) : acosh_clamped(arg);
  return scale_by(theta, inv(ad::sqrt(abs_k())));
}

Var BatchGeometry::gyro_distance(Var x, Var y) const {
  if (!projected()) throw ContractError("gyro distance is defined on P/D only");
  Var w = mobius_add(neg(x), y);
  Var q = scale_by(rowwise_sqnorm(w), abs_k());
  // 2/sqrt|K| * arctan_K(sqrt|K| |w|) = 2 |w| * atan_ratio(q)
  return scale_const(mul(ad::sqrt(clamp_min(rowwise_sqnorm(w), 0.0)), atan_ratio_sq(q, circular())),
                     2.0);
}

Var BatchGeometry::mobius_add(Var x, Var y) const {
  if (flat()) return add(x, y);
  Var x2 = rowwise_sqnorm(x);
  Var y2 = rowwise_sqnorm(y);
  Var xy = rowwise_dot(x, y);
  Var kxy2 = scale_by(xy, scale_const(k_, 2.0));
  Var cx = add_const(neg(add(kxy2, scale_by(y2, k_))), 1.0);   // 1 - 2K<x,y> - K|y|^2
  Var cy = add_const(scale_by(x2, k_), 1.0);                   // 1 + K|x|^2
  Var den = add_const(add(neg(kxy2), mul(scale_by(x2, square(k_)), y2)), 1.0);
  const ad::Mat& dv = den.value();
  for (Eigen::Index i = 0; i < dv.rows(); ++i) {
    if (std::fabs(dv(i, 0)) < 1e-15)
      throw DomainError("mobius_add: singular denominator (antipodal configuration)");
  }
  return div_col(add(mul_col(x, cx), mul_col(y, cy)), den);
}

Var BatchGeometry::gyration(Var x, Var y, Var v) const {
  if (flat()) return v;
  Var xy = mobius_add(x, y);
  Var inner_sum = mobius_add(x, mobius_add(y, v));
  return mobius_add(neg(xy), inner_sum);
}

}  // namespace mcvae::geom
