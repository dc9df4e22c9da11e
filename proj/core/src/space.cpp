#include "mcvae/geom/space.hpp"

#include <cmath>

#include "mcvae/geom/batch.hpp"

namespace mcvae::geom {

namespace {

ad::Mat as_row(const Vec& v) { return v.transpose(); }

Vec first_row(const ad::Var& v) { return v.value().row(0).transpose(); }

}  // namespace

double lorentz_product(const Vec& a, const Vec& b) {
  return a.dot(b) - 2.0 * a(0) * b(0);
}

Space::Space(Model model, double k, int dim) : declared_(model), k_(k), dim_(dim) {
  if (dim < 1) throw ContractError("space dimension must be >= 1");
  model_ = effective_model(model, k);
  ambient_ = dim + ((model_ == Model::H || model_ == Model::S) ? 1 : 0);
}

namespace {

// Runs one batch-kernel op on a throwaway tape.
template <typename F>
auto with_geometry(const Space& s, F&& f) {
  ad::Tape t;
  BatchGeometry g(s.model(), t.constant(s.flat() ? 0.0 : s.curvature()), s.dim());
  return f(t, g);
}

}  // namespace

Vec Space::origin() const {
  return with_geometry(*this, [&](ad::Tape&, BatchGeometry& g) { return first_row(g.origin(1)); });
}

Vec Space::exp(const Vec& x, const Vec& v) const {
  return with_geometry(*this, [&](ad::Tape& t, BatchGeometry& g) {
    return first_row(g.exp(t.constant(as_row(x)), t.constant(as_row(v))));
  });
}

Vec Space::log(const Vec& x, const Vec& y) const {
  return with_geometry(*this, [&](ad::Tape& t, BatchGeometry& g) {
    return first_row(g.log(t.constant(as_row(x)), t.constant(as_row(y))));
  });
}

Vec Space::parallel_transport(const Vec& x, const Vec& y, const Vec& v) const {
  return with_geometry(*this, [&](ad::Tape& t, BatchGeometry& g) {
    return first_row(g.pt(t.constant(as_row(x)), t.constant(as_row(y)), t.constant(as_row(v))));
  });
}

double Space::distance(const Vec& x, const Vec& y) const {
  return with_geometry(*this, [&](ad::Tape& t, BatchGeometry& g) {
    return g.distance(t.constant(as_row(x)), t.constant(as_row(y))).scalar();
  });
}

double Space::gyro_distance(const Vec& x, const Vec& y) const {
  return with_geometry(*this, [&](ad::Tape& t, BatchGeometry& g) {
    return g.gyro_distance(t.constant(as_row(x)), t.constant(as_row(y))).scalar();
  });
}

Vec Space::mobius_add(const Vec& x, const Vec& y) const {
  return with_geometry(*this, [&](ad::Tape& t, BatchGeometry& g) {
    return first_row(g.mobius_add(t.constant(as_row(x)), t.constant(as_row(y))));
  });
}

Vec Space::gyration(const Vec& x, const Vec& y, const Vec& v) const {
  return with_geometry(*this, [&](ad::Tape& t, BatchGeometry& g) {
    return first_row(
        g.gyration(t.constant(as_row(x)), t.constant(as_row(y)), t.constant(as_row(v))));
  });
}

double Space::inner(const Vec& x, const Vec& u, const Vec& v) const {
  if (u.size() != v.size() || u.size() != ambient_)
    throw ContractError("inner: tangent dimension mismatch");
  return with_geometry(*this, [&](ad::Tape& t, BatchGeometry& g) {
    return g.inner(t.constant(as_row(x)), t.constant(as_row(u)), t.constant(as_row(v))).scalar();
  });
}

double Space::conformal_factor(const Vec& x) const {
  return with_geometry(*this,
                       [&](ad::Tape& t, BatchGeometry& g) { return g.lambda(t.constant(as_row(x))).scalar(); });
}

double Space::tangent_norm(const Vec& x, const Vec& v) const {
  return std::sqrt(std::fmax(inner(x, v, v), 0.0));
}

Vec Space::project(const Vec& w) const {
  if (w.size() != ambient_) throw ContractError("project: wrong ambient dimension");
  switch (model_) {
    case Model::E:
      return w;
    case Model::D:
      return w;
    case Model::P: {
      double rb = radius() * (1.0 - 1e-5);
      double n = w.norm();
      if (n <= rb) return w;
      return w * (rb / n);
    }
    case Model::S: {
      double n = w.norm();
      if (n < 1e-12) throw DomainError("project: zero vector has no direction");
      return w * (radius() / n);
    }
    case Model::H: {
      double q = lorentz_product(w, w);
      if (!(q < 0.0)) throw DomainError("project: ambient vector is not timelike");
      Vec r = w * (radius() / std::sqrt(-q));
      if (r(0) < 0.0) r = -r;  // upper sheet
      return r;
    }
    default:
      throw ContractError("project: unresolved model");
  }
}

Vec Space::lift(const Vec& partial) const {
  if (partial.size() != dim_) throw ContractError("lift: wrong dimension");
  if (model_ != Model::H && model_ != Model::S)
    throw ContractError("lift: defined for H/S only");
  double s2 = partial.squaredNorm();
  Vec out(ambient_);
  if (model_ == Model::H) {
    out(0) = std::sqrt(s2 - 1.0 / k_);
  } else {
    double rad = 1.0 / k_ - s2;
    if (rad < 0.0) throw DomainError("lift: point lies outside the sphere radius");
    out(0) = std::sqrt(rad);
  }
  out.tail(dim_) = partial;
  return out;
}

bool Space::on_manifold(const Vec& x, double tol) const {
  if (x.size() != ambient_) return false;
  if (!x.allFinite()) return false;
  switch (model_) {
    case Model::E:
    case Model::D:
      return true;
    case Model::P:
      return x.squaredNorm() < -1.0 / k_;
    case Model::S: {
      double target = 1.0 / k_;
      return std::fabs(x.squaredNorm() - target) <= tol * std::fabs(target);
    }
    case Model::H: {
      double target = 1.0 / k_;
      return std::fabs(lorentz_product(x, x) - target) <= tol * std::fabs(target) && x(0) > 0.0;
    }
    default:
      return false;
  }
}

bool Space::is_tangent(const Vec& x, const Vec& v, double tol) const {
  if (v.size() != ambient_ || !v.allFinite()) return false;
  double scale = 1.0 + x.norm() * v.norm();
  if (model_ == Model::H) return std::fabs(lorentz_product(x, v)) <= tol * scale;
  if (model_ == Model::S) return std::fabs(x.dot(v)) <= tol * scale;
  return true;
}

Vec stereo_project(double k, const Vec& p) {
  if (is_flat(k)) throw ContractError("stereo_project: flat curvature");
  double xi = p(0);
  double den = 1.0 + std::sqrt(std::fabs(k)) * xi;
  if (std::fabs(den) < 1e-12)
    throw DomainError("stereo_project: point at the projection pole");
  return p.tail(p.size() - 1) / den;
}

Vec stereo_unproject(double k, const Vec& y) {
  if (is_flat(k)) throw ContractError("stereo_unproject: flat curvature");
  double y2 = y.squaredNorm();
  double den = 1.0 + k * y2;
  if (std::fabs(den) < 1e-12)
    throw DomainError("stereo_unproject: point at infinity of the chart");
  Vec out(y.size() + 1);
  out(0) = (1.0 - k * y2) / (den * std::sqrt(std::fabs(k)));
  out.tail(y.size()) = 2.0 * y / den;
  return out;
}

}  // namespace mcvae::geom
