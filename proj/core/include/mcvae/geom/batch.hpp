#pragma once

#include "mcvae/ad/tape.hpp"
#include "mcvae/geom/model.hpp"

namespace mcvae::geom {

// Differentiable constant-curvature operations on row batches.
//
// Rows are independent points/tangents of one component space. H and S work
// on ambient (n+1)-vectors whose first coordinate is the time/pole axis;
// E, P and D work on n-vectors. The curvature enters as a 1x1 tape node, so
// gradients flow to it wherever it is a differentiable leaf.
class BatchGeometry {
 public:
  // `model` must be concrete (resolve U with effective_model first).
  BatchGeometry(Model model, ad::Var k, int dim);

  Model model() const { return model_; }
  int dim() const { return dim_; }
  int ambient() const { return ambient_; }
  ad::Var k() const { return k_; }
  bool flat() const { return model_ == Model::E; }
  bool circular() const { return model_ == Model::S || model_ == Model::D; }
  bool projected() const { return model_ == Model::P || model_ == Model::D; }

  ad::Var abs_k() const;     // 1x1
  ad::Var radius() const;    // 1x1, 1/sqrt(|K|)

  ad::Var origin(Eigen::Index m) const;           // m x ambient
  ad::Var lift(ad::Var tangent_n) const;          // prepend zero column for H/S
  ad::Var drop(ad::Var tangent_amb) const;        // inverse of lift

  ad::Var kdot(ad::Var a, ad::Var b) const;       // model inner product, m x 1
  ad::Var lambda(ad::Var x) const;                // conformal factor, m x 1 (P/D/E)
  ad::Var inner(ad::Var x, ad::Var u, ad::Var v) const;  // metric inner product at x

  ad::Var exp_origin(ad::Var tangent_n) const;    // m x n -> m x ambient
  ad::Var log_origin(ad::Var y) const;            // m x ambient -> m x n
  ad::Var exp(ad::Var x, ad::Var v) const;
  ad::Var log(ad::Var x, ad::Var y) const;
  ad::Var pt(ad::Var x, ad::Var y, ad::Var v) const;
  ad::Var pt_from_origin(ad::Var y, ad::Var v) const;
  ad::Var pt_to_origin(ad::Var x, ad::Var v) const;

  ad::Var distance(ad::Var x, ad::Var y) const;        // m x 1
  ad::Var gyro_distance(ad::Var x, ad::Var y) const;   // P/D only
  ad::Var mobius_add(ad::Var x, ad::Var y) const;      // P/D (and flat limit)
  ad::Var gyration(ad::Var x, ad::Var y, ad::Var v) const;

 private:
  Model model_;
  ad::Var k_;
  int dim_;
  int ambient_;
};

// Lorentz inner product <a,b>_L = -a1 b1 + sum_i>1 ai bi, rowwise.
ad::Var lorentz_dot(ad::Var a, ad::Var b);

}  // namespace mcvae::geom
