#pragma once

#include <Eigen/Core>

#include "mcvae/geom/model.hpp"

namespace mcvae::geom {

using Vec = Eigen::VectorXd;

// Single-point view of one constant-curvature space. All operations are pure;
// the heavy lifting is delegated to the differentiable batch kernel run on a
// throwaway tape, so there is exactly one implementation of each formula.
class Space {
 public:
  Space(Model model, double k, int dim);

  Model declared_model() const { return declared_; }
  Model model() const { return model_; }  // U resolved by curvature sign
  double curvature() const { return k_; }
  double radius() const { return radius_of(k_); }
  int dim() const { return dim_; }
  int ambient() const { return ambient_; }
  bool flat() const { return model_ == Model::E; }

  Vec origin() const;
  Vec exp(const Vec& x, const Vec& v) const;
  Vec log(const Vec& x, const Vec& y) const;
  Vec parallel_transport(const Vec& x, const Vec& y, const Vec& v) const;
  double distance(const Vec& x, const Vec& y) const;
  double gyro_distance(const Vec& x, const Vec& y) const;
  Vec mobius_add(const Vec& x, const Vec& y) const;
  Vec gyration(const Vec& x, const Vec& y, const Vec& v) const;
  double inner(const Vec& x, const Vec& u, const Vec& v) const;
  double conformal_factor(const Vec& x) const;
  double tangent_norm(const Vec& x, const Vec& v) const;

  // Nearest-point style projection of an ambient vector onto the manifold
  // (renormalization for H/S, radial clipping with margin 1e-5 R for P).
  Vec project(const Vec& ambient_vec) const;

  // Completes the missing leading coordinate of an n-vector so the result
  // satisfies the manifold constraint (H/S only).
  Vec lift(const Vec& partial) const;

  bool on_manifold(const Vec& x, double tol = 1e-9) const;
  bool is_tangent(const Vec& x, const Vec& v, double tol = 1e-9) const;

 private:
  Model declared_;
  Model model_;
  double k_;
  int dim_;
  int ambient_;
};

// Stereographic projection H/S -> P/D and its inverse. `p` is an ambient
// (n+1)-vector, `y` an n-vector; K carries the sign of the source space.
Vec stereo_project(double k, const Vec& p);
Vec stereo_unproject(double k, const Vec& y);

double lorentz_product(const Vec& a, const Vec& b);

}  // namespace mcvae::geom
