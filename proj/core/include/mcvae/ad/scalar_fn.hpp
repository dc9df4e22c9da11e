#pragma once

#include <cmath>

namespace mcvae::ad {

// Smooth even-function forms of the curvature trigonometry.
//
// All geodesic formulas in this library consume an angle only through its
// square q = theta^2, so the removable 0/0 singularities of sin(theta)/theta
// and friends become ordinary smooth functions of q >= 0. Below the series
// threshold the value and the d/dq derivative are evaluated by Taylor
// expansion; above it by the closed form.

inline constexpr double kRatioSeriesQ = 1e-4;

// sin(sqrt(q))/sqrt(q) for the circular branch, sinh(sqrt(q))/sqrt(q) for the
// hyperbolic one.
inline double sin_ratio_sq(double q, bool circ) {
  if (q < kRatioSeriesQ) {
    double s = circ ? -1.0 : 1.0;
    return 1.0 + s * q / 6.0 + q * q / 120.0 + s * q * q * q / 5040.0;
  }
  double t = std::sqrt(q);
  return (circ ? std::sin(t) : std::sinh(t)) / t;
}

inline double sin_ratio_sq_d(double q, bool circ) {
  if (q < kRatioSeriesQ) {
    double s = circ ? -1.0 : 1.0;
    return s / 6.0 + q / 60.0 + s * q * q / 1680.0;
  }
  double t = std::sqrt(q);
  double c = circ ? std::cos(t) : std::cosh(t);
  return (c - sin_ratio_sq(q, circ)) / (2.0 * q);
}

// cos(sqrt(q)) / cosh(sqrt(q)); derivative is -+ sin_ratio_sq / 2.
inline double cos_sqrt(double q, bool circ) {
  double t = std::sqrt(q);
  return circ ? std::cos(t) : std::cosh(t);
}

inline double cos_sqrt_d(double q, bool circ) {
  return (circ ? -0.5 : 0.5) * sin_ratio_sq(q, circ);
}

// tan(sqrt(q))/sqrt(q) and tanh variant.
inline double tan_ratio_sq(double q, bool circ) {
  if (q < kRatioSeriesQ) {
    double s = circ ? 1.0 : -1.0;
    return 1.0 + s * q / 3.0 + 2.0 * q * q / 15.0 + s * 17.0 * q * q * q / 315.0;
  }
  double t = std::sqrt(q);
  return (circ ? std::tan(t) : std::tanh(t)) / t;
}

inline double tan_ratio_sq_d(double q, bool circ) {
  if (q < kRatioSeriesQ) {
    double s = circ ? 1.0 : -1.0;
    return s / 3.0 + 4.0 * q / 15.0 + s * 17.0 * q * q / 105.0;
  }
  double t = std::sqrt(q);
  double tn = circ ? std::tan(t) : std::tanh(t);
  double dsec = circ ? 1.0 + tn * tn : 1.0 - tn * tn;
  return (dsec - tn / t) / (2.0 * q);
}

// atan(sqrt(q))/sqrt(q) and atanh variant (q < 1 for the hyperbolic branch).
inline double atan_ratio_sq(double q, bool circ) {
  if (q < kRatioSeriesQ) {
    double s = circ ? -1.0 : 1.0;
    return 1.0 + s * q / 3.0 + q * q / 5.0 + s * q * q * q / 7.0 + q * q * q * q / 9.0;
  }
  double t = std::sqrt(q);
  return (circ ? std::atan(t) : std::atanh(t)) / t;
}

inline double atan_ratio_sq_d(double q, bool circ) {
  if (q < kRatioSeriesQ) {
    double s = circ ? -1.0 : 1.0;
    return s / 3.0 + 2.0 * q / 5.0 + s * 3.0 * q * q / 7.0 + 4.0 * q * q * q / 9.0;
  }
  double recip = circ ? 1.0 / (1.0 + q) : 1.0 / (1.0 - q);
  return (recip - atan_ratio_sq(q, circ)) / (2.0 * q);
}

// Numerically stable softplus and logistic sigmoid.
inline double softplus(double x) {
  return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

inline double sigmoid(double x) {
  if (x >= 0.0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace mcvae::ad
