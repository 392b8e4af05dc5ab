#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/lorenz96.hpp"
#include "core/rng.hpp"

using ee::Lorenz96Model;

namespace {

// Independent oracle: same equations written with if-based wraparound and a
// (j, k) double loop instead of the flat fast index. Term order matches the
// implementation so equality is exact, not approximate.
void oracle_rhs(const Lorenz96Model& m, double f, const double* state, double* deriv) {
  const int K = m.slow_count, J = m.fast_per_slow;
  const double c = m.coupling_c;
  const double* u = state;
  const double* v = state + K;

  for (int k = 0; k < K; ++k) {
    int km1 = k - 1;
    if (km1 < 0) km1 += K;
    int km2 = k - 2;
    if (km2 < 0) km2 += K;
    int kp1 = k + 1;
    if (kp1 >= K) kp1 -= K;
    double vbar = 0.0;
    for (int j = 0; j < J; ++j) vbar += v[k * J + j];
    vbar /= J;
    deriv[k] = -u[km1] * (u[km2] - u[kp1]) - u[k] + f - c * vbar;
  }
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < J; ++j) {
      const int total = K * J;
      int p1 = k * J + j + 1;
      if (p1 >= total) p1 -= total;
      int p2 = k * J + j + 2;
      if (p2 >= total) p2 -= total;
      int n1 = k * J + j - 1;
      if (n1 < 0) n1 += total;
      deriv[K + k * J + j] = c * (-v[p1] * (v[p2] - v[n1]) - v[k * J + j] + u[k] / J);
    }
  }
}

Lorenz96Model desk_model() {
  Lorenz96Model m;
  m.slow_count = 8;
  m.fast_per_slow = 4;
  m.trajectory_steps = 400;
  m.crop_steps = 64;
  return m;
}

}  // namespace

TEST_CASE("rhs equals the index-loop oracle exactly") {
  for (auto [K, J] : {std::pair{8, 4}, std::pair{36, 10}, std::pair{5, 1}}) {
    Lorenz96Model m = desk_model();
    m.slow_count = K;
    m.fast_per_slow = J;
    ee::Rng rng(K * 100 + J);
    std::vector<double> state(m.state_dim()), d1(m.state_dim()), d2(m.state_dim());
    for (int t = 0; t < 20; ++t) {
      for (double& x : state) x = 3.0 * rng.normal();
      const double f = rng.uniform(0.0, 21.0);
      ee::lorenz_rhs(m, f, state.data(), d1.data());
      oracle_rhs(m, f, state.data(), d2.data());
      for (int i = 0; i < m.state_dim(); ++i) CHECK(d1[i] == d2[i]);
    }
  }
}

TEST_CASE("rk4 halving the step shrinks the endpoint error by 8x to 32x") {
  Lorenz96Model m = desk_model();
  const double f = 8.0;
  ee::Rng rng(55);
  std::vector<double> init(m.state_dim());
  for (double& x : init) x = rng.normal();

  auto integrate = [&](double dt, int steps) {
    std::vector<double> s = init;
    for (int t = 0; t < steps; ++t) ee::lorenz_rk4_step(m, f, s.data(), dt);
    return s;
  };
  // Horizon 0.08 time units; reference at dt/4.
  const std::vector<double> ref = integrate(0.0025, 32);
  const std::vector<double> coarse = integrate(0.01, 8);
  const std::vector<double> fine = integrate(0.005, 16);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < m.state_dim(); ++i) {
    e1 += (coarse[i] - ref[i]) * (coarse[i] - ref[i]);
    e2 += (fine[i] - ref[i]) * (fine[i] - ref[i]);
  }
  const double ratio = std::sqrt(e1) / std::sqrt(e2);
  INFO("error ratio ", ratio);
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("trajectories are reproducible and crops respect bounds") {
  Lorenz96Model m = desk_model();
  const double phi[2] = {6.0, 8.0};  // F = 10
  CHECK(m.forcing(phi) == doctest::Approx(10.0));

  const std::vector<double> y1 = ee::lorenz_generate(m, phi, 2024);
  const std::vector<double> y2 = ee::lorenz_generate(m, phi, 2024);
  CHECK(y1 == y2);
  CHECK(static_cast<int>(y1.size()) == m.obs_dim());

  const std::vector<double> y3 = ee::lorenz_generate(m, phi, 2025);
  CHECK(y1 != y3);
}

TEST_CASE("crop-mode augmentation re-crops the same trajectory") {
  Lorenz96Model m = desk_model();
  const double phi[2] = {6.0, 8.0};
  const std::uint64_t seed = 77;
  ee::Matrix traj = ee::lorenz_trajectory(m, m.forcing(phi), seed);

  const std::vector<double> a1 = ee::lorenz_augment(m, phi, seed, 0, &traj);
  const std::vector<double> a1_again = ee::lorenz_augment(m, phi, seed, 0, nullptr);
  CHECK(a1 == a1_again);  // cache must not change the answer
  const std::vector<double> a2 = ee::lorenz_augment(m, phi, seed, 1, &traj);
  CHECK(a1 != a2);

  // Every augmented window must be a contiguous row window of the trajectory.
  bool found = false;
  for (int start = 0; start + m.crop_steps <= m.trajectory_steps && !found; ++start) {
    bool match = true;
    for (int t = 0; t < m.crop_steps && match; ++t)
      for (int i = 0; i < m.state_dim(); ++i)
        if (a2[t * m.state_dim() + i] != traj(start + t, i)) {
          match = false;
          break;
        }
    found = match;
  }
  CHECK(found);
}

TEST_CASE("fresh-mode augmentation simulates a new trajectory") {
  Lorenz96Model m = desk_model();
  m.augment = Lorenz96Model::Augment::fresh;
  const double phi[2] = {6.0, 8.0};
  const std::vector<double> a1 = ee::lorenz_augment(m, phi, 77, 0);
  const std::vector<double> a2 = ee::lorenz_augment(m, phi, 77, 0);
  const std::vector<double> a3 = ee::lorenz_augment(m, phi, 77, 1);
  CHECK(a1 == a2);
  CHECK(a1 != a3);
}

TEST_CASE("divergence raises a runtime error with step context") {
  Lorenz96Model m = desk_model();
  m.dt = 0.5;  // way past the stability limit
  const double phi[2] = {0.0, 21.0};
  CHECK_THROWS_AS(ee::lorenz_trajectory(m, m.forcing(phi), 3), ee::RuntimeError);
  try {
    ee::lorenz_trajectory(m, m.forcing(phi), 3);
  } catch (const ee::RuntimeError& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("model validation rejects bad shapes") {
  Lorenz96Model m = desk_model();
  m.crop_steps = m.trajectory_steps + 1;
  CHECK_THROWS_AS(m.validate(), ee::ConfigError);
  m = desk_model();
  m.slow_count = 2;
  CHECK_THROWS_AS(m.validate(), ee::ConfigError);
  m = desk_model();
  m.dt = 0.0;
  CHECK_THROWS_AS(m.validate(), ee::ConfigError);
}

TEST_CASE("desk-scale observation dim matches T * K * (J + 1)") {
  Lorenz96Model m = desk_model();
  CHECK(m.obs_dim() == 64 * 8 * 5);
  Lorenz96Model paper;
  paper.slow_count = 36;
  paper.fast_per_slow = 10;
  paper.trajectory_steps = 2000;
  paper.crop_steps = 250;
  CHECK(paper.obs_dim() == 99000);
}
