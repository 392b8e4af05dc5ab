#pragma once

#include "core/rng.hpp"

namespace ee {

// Draws an angle from the von Mises distribution vM(mu, kappa) using the
// Best-Fisher wrapped-Cauchy rejection envelope. kappa = 0 degenerates to a
// uniform angle. This is the S^1 case of the von Mises-Fisher family: the
// sampled direction (cos t, sin t) has density proportional to
// exp(kappa * dot(dir, mean_dir)).
double sample_von_mises_angle(double mu, double kappa, Rng& rng);

// Unit vector on S^1 with vMF(kappa, mean_dir) law; mean_dir must be unit.
void sample_vmf_circle(const double mean_dir[2], double kappa, Rng& rng, double out[2]);

}  // namespace ee
