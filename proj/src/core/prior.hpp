#pragma once

#include <cstddef>
#include <vector>

#include "core/rng.hpp"

namespace ee {

enum class PriorKind { transformed_circle, uniform_box };

// Parameter prior. Two families:
//  - transformed_circle: phi = A^{-1} z with z uniform on S^1, so the support
//    is the ellipse A^{-1} S^1 and the density w.r.t. the curve's natural
//    parameterization is the constant |det A| / (2 pi).
//  - uniform_box: axis-aligned box with per-dimension bounds.
// With `redundant` set, a leading coordinate phi_R ~ U(0, 1) is prepended;
// it never influences simulators. A circle prior may be restricted to the
// angle window [angle_lo, angle_hi], which shrinks its support (used for
// alternative-prior inference); the default covers the whole circle.
struct PriorSpec {
  PriorKind kind = PriorKind::uniform_box;
  double a[4] = {1.0, 0.0, 0.0, 1.0};  // circle transform, row-major
  double angle_lo = 0.0, angle_hi = 6.283185307179586476925286766559;
  std::vector<double> lo, hi;          // box bounds
  bool redundant = false;

  std::size_t effective_dim() const;
  std::size_t dim() const { return effective_dim() + (redundant ? 1 : 0); }

  double det_a() const { return a[0] * a[3] - a[1] * a[2]; }
  // phi(t) = A^{-1} (cos t, sin t), the circle support parameterization.
  void circle_point(double t, double* phi_eff) const;

  bool in_support(const double* phi) const;
  double density(const double* phi) const;
  void sample(Rng& rng, double* phi) const;

  void validate() const;  // throws ConfigError on inconsistent fields
};

}  // namespace ee
