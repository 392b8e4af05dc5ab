#pragma once

#include <cstdint>
#include <vector>

#include "core/matrix.hpp"
#include "core/rng.hpp"

namespace ee {

// Two-scale Lorenz 96. K slow variables u^k, each coupled to J fast variables
// v^{j,k}; the fast variables form one cyclic chain of length K*J (global
// index m = k*J + j), so j-neighbors cross into adjacent blocks at block
// boundaries. The scalar forcing F enters only the slow equation; parameters
// are phi = (F1, F2) with F = sqrt(F1^2 + F2^2), which makes the posterior
// over phi a circle (rotation non-identifiability).
struct Lorenz96Model {
  int slow_count = 8;        // K
  int fast_per_slow = 4;     // J
  double coupling_c = 10.0;  // c
  double dt = 0.005;         // integrator step, time units
  int trajectory_steps = 400;  // saved frames per simulation
  int crop_steps = 64;         // frames per observation window

  enum class Augment { crop, fresh };
  Augment augment = Augment::crop;

  int state_dim() const { return slow_count * (fast_per_slow + 1); }
  int obs_dim() const { return crop_steps * state_dim(); }
  static constexpr int param_dim() { return 2; }
  double forcing(const double* phi) const;

  void validate() const;
};

// d(state)/dt with state = [u_0..u_{K-1}, v_0..v_{KJ-1}].
void lorenz_rhs(const Lorenz96Model& m, double f, const double* state, double* deriv);

// Classical fixed-step RK4.
void lorenz_rk4_step(const Lorenz96Model& m, double f, double* state, double dt);

// Integrates from standard-normal initial conditions, saving the state after
// every step (trajectory_steps rows of state_dim columns). Throws
// RuntimeError with the step index if the state stops being finite.
Matrix lorenz_trajectory(const Lorenz96Model& m, double f, std::uint64_t seed);

// Contiguous random window of `crop_steps` frames, flattened row-major.
std::vector<double> crop_trajectory(const Lorenz96Model& m, const Matrix& traj, Rng& rng);

// Full observation draw for a dataset record: trajectory from the record
// seed, crop from a stream derived from the same seed.
std::vector<double> lorenz_generate(const Lorenz96Model& m, const double* phi, std::uint64_t seed);

// Augmented view sharing phi with a record: either a fresh crop of the exact
// same trajectory (Augment::crop; cached trajectory may be supplied to skip
// re-simulation) or a fresh-initial-condition simulation (Augment::fresh).
std::vector<double> lorenz_augment(const Lorenz96Model& m, const double* phi,
                                   std::uint64_t record_seed, std::uint64_t aug_seed,
                                   const Matrix* cached_trajectory = nullptr);

}  // namespace ee
