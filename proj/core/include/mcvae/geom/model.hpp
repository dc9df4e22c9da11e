#pragma once

#include <cmath>
#include <string>

#include "mcvae/util/error.hpp"

namespace mcvae::geom {

// E: Euclidean, H: hyperboloid, S: hypersphere, P: Poincare ball,
// D: projected hypersphere, U: sign-agnostic gyro space (dispatches to
// P / E / D by the sign of the curvature).
enum class Model { E, H, S, P, D, U };

// Curvatures with |K| below this are treated as exactly flat.
inline constexpr double kFlatTau = 1e-7;

inline bool is_flat(double k) { return std::fabs(k) < kFlatTau; }

inline char model_tag(Model m) {
  switch (m) {
    case Model::E: return 'e';
    case Model::H: return 'h';
    case Model::S: return 's';
    case Model::P: return 'p';
    case Model::D: return 'd';
    case Model::U: return 'u';
  }
  return '?';
}

Model model_from_tag(char c);

// Checks the (model, curvature) sign contract; throws ContractError on
// mismatch. H and S additionally reject |K| < tau: their points diverge as
// K -> 0, so a flat hyperboloid/sphere cannot be represented.
void validate_curvature(Model m, double k);

// Resolves U to P/E/D by sign; identity (after validation) otherwise.
Model effective_model(Model m, double k);

inline double radius_of(double k) {
  if (is_flat(k)) throw ContractError("radius undefined for flat curvature");
  return 1.0 / std::sqrt(std::fabs(k));
}

// Sign-of-K dispatched trigonometry on plain doubles: the circular branch for
// K > 0 and the hyperbolic branch for K < 0. Flat K is a caller error here.
double curv_sin(double k, double x);
double curv_cos(double k, double x);
double curv_tan(double k, double x);
double curv_atan(double k, double x);
// arccos_K: acos for K > 0, acosh for K < 0; arguments outside the domain by
// at most 1e-9 are clamped, larger violations raise DomainError.
double curv_acos(double k, double x);

}  // namespace mcvae::geom
