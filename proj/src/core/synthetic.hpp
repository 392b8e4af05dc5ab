#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "core/prior.hpp"
#include "core/rng.hpp"

namespace ee {

// SVD of a 2x2 (m = u * diag(s) * v^T, u/v rotations-with-reflection,
// s[0] >= s[1] >= 0). Exposed for tests.
void svd2x2(const double m[4], double u[4], double s[2], double v[4]);

// Synthetic benchmark: latent z ~ vMF(kappa, A phi) on S^1 pushed through an
// invertible decoder MLP (five 2x2 leaky-relu hidden layers plus a final
// linear layer, singular values clipped to [0.1, 1] so each layer's condition
// number stays <= 10). The decoder is bijective on R^2 with a closed-form
// inverse, so the true data-side embedding f(y) = decoder^{-1}(y) and the
// true parameter-side embedding g(phi) = A phi are both available exactly.
struct SyntheticModel {
  double kappa = 2.0;
  double a[4] = {0.5, 0.2, 0.0, 0.8};
  std::uint64_t decoder_seed = 1;
  bool redundant = false;
  std::vector<std::array<double, 4>> layers;  // six 2x2 weight matrices

  static SyntheticModel create(double kappa, const double a[4], std::uint64_t decoder_seed,
                               bool redundant);

  std::size_t param_dim() const { return redundant ? 3 : 2; }
  static constexpr std::size_t obs_dim() { return 2; }

  void decode(const double z[2], double y[2]) const;
  void decode_inverse(const double y[2], double z[2]) const;
  // g(phi) = A * (effective part of phi); unit norm iff phi is on the prior
  // support.
  void true_g(const double* phi, double g[2]) const;

  // Draws z ~ vMF(kappa, A phi) and returns y = decode(z). phi must lie on
  // the prior support (A phi unit).
  void generate(const double* phi, Rng& rng, double y[2], double z[2]) const;

  PriorSpec prior() const;
};

// Closed-form posterior density p(phi | y) for the synthetic task,
// proportional to exp(kappa * f(y) . g(phi)) * p(phi) and normalized over the
// prior support with a uniform angle quadrature grid (shared with the
// diagnostics). The constructor caches f(y) and the grid normalizer.
class SyntheticTruePosterior {
public:
  SyntheticTruePosterior(const SyntheticModel& model, const double y[2], int grid_n = 2048);

  double density(const double* phi) const;
  double log_kernel(const double* phi) const;  // kappa * f(y) . g(phi)
  const double* f_y() const { return f_; }

private:
  const SyntheticModel& model_;
  double f_[2];
  double z_norm_;  // quadrature normalizer
};

}  // namespace ee
