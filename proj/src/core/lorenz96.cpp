#include "core/lorenz96.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace ee {

namespace {
constexpr std::uint64_t kInitStream = 0x1096u;
constexpr std::uint64_t kCropStream = 0x2096u;
constexpr std::uint64_t kFreshStream = 0x3096u;
}  // namespace

double Lorenz96Model::forcing(const double* phi) const {
  return std::sqrt(phi[0] * phi[0] + phi[1] * phi[1]);
}

void Lorenz96Model::validate() const {
  if (slow_count < 4) throw ConfigError("lorenz96 needs at least 4 slow variables");
  if (fast_per_slow < 1) throw ConfigError("lorenz96 needs at least 1 fast variable per slow");
  if (!(dt > 0.0)) throw ConfigError("lorenz96 dt must be positive");
  if (trajectory_steps < 1 || crop_steps < 1) throw ConfigError("lorenz96 step counts must be positive");
  if (crop_steps > trajectory_steps) throw ConfigError("lorenz96 crop window exceeds the trajectory");
}

void lorenz_rhs(const Lorenz96Model& m, double f, const double* state, double* deriv) {
  const int k_n = m.slow_count;
  const int j_n = m.fast_per_slow;
  const int fast_n = k_n * j_n;
  const double c = m.coupling_c;
  const double* u = state;
  const double* v = state + k_n;
  double* du = deriv;
  double* dv = deriv + k_n;

  for (int k = 0; k < k_n; ++k) {
    const int km1 = (k - 1 + k_n) % k_n;
    const int km2 = (k - 2 + k_n) % k_n;
    const int kp1 = (k + 1) % k_n;
    double vbar = 0.0;
    for (int j = 0; j < j_n; ++j) vbar += v[k * j_n + j];
    vbar /= j_n;
    du[k] = -u[km1] * (u[km2] - u[kp1]) - u[k] + f - c * vbar;
  }
  for (int mg = 0; mg < fast_n; ++mg) {
    const int mp1 = (mg + 1) % fast_n;
    const int mp2 = (mg + 2) % fast_n;
    const int mm1 = (mg - 1 + fast_n) % fast_n;
    const int k = mg / j_n;
    dv[mg] = c * (-v[mp1] * (v[mp2] - v[mm1]) - v[mg] + u[k] / j_n);
  }
}

void lorenz_rk4_step(const Lorenz96Model& m, double f, double* state, double dt) {
  const int n = m.state_dim();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

  lorenz_rhs(m, f, state, k1.data());
  for (int i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * dt * k1[i];
  lorenz_rhs(m, f, tmp.data(), k2.data());
  for (int i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * dt * k2[i];
  lorenz_rhs(m, f, tmp.data(), k3.data());
  for (int i = 0; i < n; ++i) tmp[i] = state[i] + dt * k3[i];
  lorenz_rhs(m, f, tmp.data(), k4.data());
  for (int i = 0; i < n; ++i)
    state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

Matrix lorenz_trajectory(const Lorenz96Model& m, double f, std::uint64_t seed) {
  m.validate();
  const int n = m.state_dim();
  std::vector<double> state(n);
  Rng init = Rng::stream(seed, kInitStream, 0);
  for (double& x : state) x = init.normal();

  Matrix traj(m.trajectory_steps, n);
  for (int t = 0; t < m.trajectory_steps; ++t) {
    lorenz_rk4_step(m, f, state.data(), m.dt);
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(state[i]))
        throw RuntimeError("lorenz96 diverged at step " + std::to_string(t + 1) +
                           " (F = " + std::to_string(f) + ")");
      traj(t, i) = state[i];
    }
  }
  return traj;
}

std::vector<double> crop_trajectory(const Lorenz96Model& m, const Matrix& traj, Rng& rng) {
  const int max_start = m.trajectory_steps - m.crop_steps;
  const int start = max_start == 0 ? 0 : static_cast<int>(rng.below(max_start + 1));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.obs_dim()));
  for (int t = start; t < start + m.crop_steps; ++t)
    out.insert(out.end(), traj.row(t), traj.row(t) + m.state_dim());
  return out;
}

std::vector<double> lorenz_generate(const Lorenz96Model& m, const double* phi, std::uint64_t seed) {
  Matrix traj = lorenz_trajectory(m, m.forcing(phi), seed);
  Rng crop_rng = Rng::stream(seed, kCropStream, 0);
  return crop_trajectory(m, traj, crop_rng);
}

std::vector<double> lorenz_augment(const Lorenz96Model& m, const double* phi,
                                   std::uint64_t record_seed, std::uint64_t aug_seed,
                                   const Matrix* cached_trajectory) {
  if (m.augment == Lorenz96Model::Augment::fresh) {
    const std::uint64_t sim_seed = Rng::mix(record_seed, kFreshStream, aug_seed);
    Matrix traj = lorenz_trajectory(m, m.forcing(phi), sim_seed);
    Rng crop_rng = Rng::stream(sim_seed, kCropStream, 0);
    return crop_trajectory(m, traj, crop_rng);
  }
  Rng crop_rng = Rng::stream(record_seed, kCropStream, aug_seed + 1);
  if (cached_trajectory != nullptr) return crop_trajectory(m, *cached_trajectory, crop_rng);
  Matrix traj = lorenz_trajectory(m, m.forcing(phi), record_seed);
  return crop_trajectory(m, traj, crop_rng);
}

}  // namespace ee
