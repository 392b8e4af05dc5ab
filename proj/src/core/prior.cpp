#include "core/prior.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace ee {

namespace {
constexpr double kCircleTol = 1e-9;
}

std::size_t PriorSpec::effective_dim() const {
  return kind == PriorKind::transformed_circle ? 2 : lo.size();
}

void PriorSpec::validate() const {
  if (kind == PriorKind::transformed_circle) {
    if (std::abs(det_a()) < 1e-12) throw ConfigError("circle prior transform A is singular");
    if (!(angle_lo >= 0.0) || !(angle_lo < angle_hi) || angle_hi > 2.0 * M_PI + 1e-12)
      throw ConfigError("circle prior angle window must satisfy 0 <= lo < hi <= 2 pi");
  } else {
    if (lo.empty() || lo.size() != hi.size()) throw ConfigError("box prior needs matching lo/hi bounds");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw ConfigError("box prior needs lo < hi in every dimension");
  }
}

void PriorSpec::circle_point(double t, double* phi_eff) const {
  const double z0 = std::cos(t), z1 = std::sin(t);
  const double d = det_a();
  phi_eff[0] = (a[3] * z0 - a[1] * z1) / d;
  phi_eff[1] = (-a[2] * z0 + a[0] * z1) / d;
}

bool PriorSpec::in_support(const double* phi) const {
  if (redundant) {
    if (phi[0] < 0.0 || phi[0] > 1.0) return false;
    ++phi;
  }
  if (kind == PriorKind::transformed_circle) {
    const double z0 = a[0] * phi[0] + a[1] * phi[1];
    const double z1 = a[2] * phi[0] + a[3] * phi[1];
    if (std::abs(std::sqrt(z0 * z0 + z1 * z1) - 1.0) > kCircleTol) return false;
    double t = std::atan2(z1, z0);
    if (t < 0.0) t += 2.0 * M_PI;
    return t >= angle_lo - kCircleTol && t <= angle_hi + kCircleTol;
  }
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (phi[i] < lo[i] || phi[i] > hi[i]) return false;
  return true;
}

double PriorSpec::density(const double* phi) const {
  if (!in_support(phi)) return 0.0;
  if (kind == PriorKind::transformed_circle) return std::abs(det_a()) / (angle_hi - angle_lo);
  double d = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) d /= (hi[i] - lo[i]);
  return d;  // redundant U(0,1) factor is 1
}

void PriorSpec::sample(Rng& rng, double* phi) const {
  if (redundant) {
    phi[0] = rng.uniform();
    ++phi;
  }
  if (kind == PriorKind::transformed_circle) {
    circle_point(rng.uniform(angle_lo, angle_hi), phi);
    return;
  }
  for (std::size_t i = 0; i < lo.size(); ++i) phi[i] = rng.uniform(lo[i], hi[i]);
}

}  // namespace ee
