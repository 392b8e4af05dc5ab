#include "core/vmf.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace ee {

double sample_von_mises_angle(double mu, double kappa, Rng& rng) {
  if (kappa < 0.0 || !std::isfinite(kappa)) throw DomainError("von Mises kappa must be finite and >= 0");
  if (kappa < 1e-9) return mu + 2.0 * M_PI * (rng.uniform() - 0.5);

  // Best & Fisher (1979) rejection from a wrapped Cauchy.
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);

  double f;
  for (;;) {
    const double z = std::cos(M_PI * rng.uniform());
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    const double u2 = rng.uniform();
    if (c * (2.0 - c) - u2 > 0.0) break;
    if (std::log(c / u2) + 1.0 - c >= 0.0) break;
  }
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return mu + sign * std::acos(f);
}

void sample_vmf_circle(const double mean_dir[2], double kappa, Rng& rng, double out[2]) {
  const double n = std::sqrt(mean_dir[0] * mean_dir[0] + mean_dir[1] * mean_dir[1]);
  if (std::abs(n - 1.0) > 1e-6) throw DomainError("vMF mean direction must be a unit vector");
  const double mu = std::atan2(mean_dir[1], mean_dir[0]);
  const double t = sample_von_mises_angle(mu, kappa, rng);
  out[0] = std::cos(t);
  out[1] = std::sin(t);
}

}  // namespace ee
