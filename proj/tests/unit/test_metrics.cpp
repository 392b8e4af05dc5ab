#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/matrix.hpp"
#include "core/metrics.hpp"
#include "core/network.hpp"
#include "core/posterior.hpp"
#include "core/prior.hpp"
#include "core/rng.hpp"

using ee::Matrix;

TEST_CASE("linear-interpolation percentile on frozen references") {
  const std::vector<double> a = {4.0, 2.0, 1.0, 3.0};
  CHECK(ee::percentile_linear(a, 25.0) == 1.75);
  CHECK(ee::percentile_linear(a, 50.0) == 2.5);
  CHECK(ee::percentile_linear(a, 75.0) == 3.25);

  const std::vector<double> b = {3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(ee::percentile_linear(b, 25.0) == 1.75);
  CHECK(ee::percentile_linear(b, 50.0) == 3.5);
  CHECK(ee::percentile_linear(b, 75.0) == 5.25);

  CHECK(ee::percentile_linear({7.0}, 50.0) == 7.0);
  CHECK(ee::percentile_linear(b, 0.0) == 1.0);
  CHECK(ee::percentile_linear(b, 100.0) == 9.0);
  CHECK_THROWS_AS(ee::percentile_linear({}, 50.0), ee::DomainError);
  CHECK_THROWS_AS(ee::percentile_linear(a, -1.0), ee::DomainError);
  CHECK_THROWS_AS(ee::percentile_linear(a, 101.0), ee::DomainError);
}

TEST_CASE("l1 distance between weight vectors") {
  CHECK(ee::l1_posterior_distance({0.2, 0.3, 0.5}, {0.1, 0.5, 0.4}) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(ee::l1_posterior_distance({1.0}, {1.0}) == 0.0);
  // Disjoint unit masses are maximally separated under the normalized view.
  CHECK(ee::l1_posterior_distance({1.0, 0.0}, {0.0, 1.0}) == 2.0);
  CHECK_THROWS_AS(ee::l1_posterior_distance({1.0}, {0.5, 0.5}), ee::DomainError);
  CHECK_THROWS_AS(ee::l1_posterior_distance({}, {}), ee::DomainError);
}

TEST_CASE("r2 recovers exact affine maps and rejects degenerate sources") {
  ee::Rng rng(91);
  const int n = 1000;
  Matrix src(n, 2), dst(n, 2);
  for (int i = 0; i < n; ++i) {
    src(i, 0) = rng.normal();
    src(i, 1) = rng.normal();
    // Rotation plus shift is affine: R^2 must be exactly one.
    const double c = std::cos(0.7), s = std::sin(0.7);
    dst(i, 0) = c * src(i, 0) - s * src(i, 1) + 2.0;
    dst(i, 1) = s * src(i, 0) + c * src(i, 1) - 1.0;
  }
  CHECK(ee::latent_recovery_r2(src, dst) == doctest::Approx(1.0).epsilon(1e-12));

  // Independent noise has no linear relation.
  Matrix noise(n, 2);
  for (double& v : noise.data) v = rng.normal();
  const double r2 = ee::latent_recovery_r2(src, noise);
  CHECK(std::abs(r2) <= 0.05);

  // A constant source column makes the normal equations singular.
  Matrix flat(n, 2);
  for (int i = 0; i < n; ++i) {
    flat(i, 0) = 1.0;
    flat(i, 1) = 1.0;
  }
  CHECK_THROWS_AS(ee::latent_recovery_r2(flat, dst), ee::DomainError);

  Matrix short_dst(4, 2);
  CHECK_THROWS_AS(ee::latent_recovery_r2(src, short_dst), ee::DomainError);
}

TEST_CASE("mmd squared on hand-checkable point sets") {
  Matrix x(3, 2);
  x(0, 0) = 0.1; x(0, 1) = 0.2;
  x(1, 0) = -0.3; x(1, 1) = 0.4;
  x(2, 0) = 0.0; x(2, 1) = -0.1;
  CHECK(ee::mmd_squared(x, x, 0.05) <= 1e-12);

  // Singleton sets: mmd^2 = 2 - 2 k(x, y).
  Matrix a(1, 2), b(1, 2);
  a(0, 0) = 0.0; a(0, 1) = 0.0;
  b(0, 0) = 0.3; b(0, 1) = 0.4;
  const double sigma = 0.2;
  const double k = std::exp(-0.25 / (2.0 * sigma * sigma));
  CHECK(ee::mmd_squared(a, b, sigma) == doctest::Approx(2.0 - 2.0 * k).epsilon(1e-14));

  // Symmetry and nonnegativity on random clouds.
  ee::Rng rng(17);
  Matrix p(40, 2), q(30, 2);
  for (double& v : p.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : q.data) v = rng.uniform(-0.5, 1.5);
  const double pq = ee::mmd_squared(p, q, 0.3);
  CHECK(ee::mmd_squared(q, p, 0.3) == doctest::Approx(pq).epsilon(1e-12));
  CHECK(pq >= 0.0);
  // Separated clouds dominate overlapping ones.
  Matrix far(30, 2);
  for (double& v : far.data) v = rng.uniform(9.0, 10.0);
  CHECK(ee::mmd_squared(p, far, 0.3) > pq);

  Matrix wrong(4, 3);
  CHECK_THROWS_AS(ee::mmd_squared(p, wrong, 0.3), ee::DomainError);
  CHECK_THROWS_AS(ee::mmd_squared(p, q, 0.0), ee::DomainError);
}

TEST_CASE("mmd separates distributions against a permutation null") {
  ee::Rng rng(29);
  const int n = 128;
  Matrix p(n, 2), q(n, 2);
  for (double& v : p.data) v = rng.normal() * 0.1;
  for (double& v : q.data) v = rng.normal() * 0.1 + 0.15;
  const double observed = ee::mmd_squared(p, q, 0.1);

  // Null distribution: shuffle the pooled rows into two fresh halves.
  std::vector<double> null_stats;
  Matrix pool(2 * n, 2);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 2; ++c) {
      pool(i, c) = p(i, c);
      pool(n + i, c) = q(i, c);
    }
  std::vector<int> idx(2 * n);
  for (int i = 0; i < 2 * n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int rep = 0; rep < 100; ++rep) {
    for (int i = 2 * n - 1; i > 0; --i)
      std::swap(idx[static_cast<std::size_t>(i)],
                idx[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    Matrix ph(n, 2), qh(n, 2);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) {
        ph(i, c) = pool(idx[static_cast<std::size_t>(i)], c);
        qh(i, c) = pool(idx[static_cast<std::size_t>(n + i)], c);
      }
    null_stats.push_back(ee::mmd_squared(ph, qh, 0.1));
  }
  const double crit = ee::percentile_linear(null_stats, 95.0);
  CHECK(observed > crit);
}

TEST_CASE("normalizer dispersion statistics") {
  ee::RatioModel m;
  m.enc_spec = {3, 10, 1, 2};
  m.emu_spec = {2, 10, 1, 2};
  m.tau = 0.8;
  m.enc_w = ee::init_weights(m.enc_spec, 3);
  m.emu_w = ee::init_weights(m.emu_spec, 4);

  ee::PriorSpec prior;
  prior.kind = ee::PriorKind::uniform_box;
  prior.lo = {-1.0, -1.0};
  prior.hi = {1.0, 1.0};

  ee::Rng rng(5);
  Matrix obs(6, 3);
  for (double& v : obs.data) v = rng.uniform(-1.0, 1.0);

  // The cv must reproduce the population std/mean of per-observation
  // normalizer estimates taken with the shared seed.
  std::vector<double> cs(6);
  for (int i = 0; i < 6; ++i) {
    std::vector<double> row(obs.row(static_cast<std::size_t>(i)),
                            obs.row(static_cast<std::size_t>(i)) + 3);
    cs[static_cast<std::size_t>(i)] = ee::estimate_normalizer(m, row, prior, 200, 9);
  }
  double mean = 0.0;
  for (double c : cs) mean += c;
  mean /= 6.0;
  double var = 0.0;
  for (double c : cs) var += (c - mean) * (c - mean);
  var /= 6.0;
  const double cv = ee::normalizer_cv(m, obs, prior, 200, 9);
  CHECK(cv == doctest::Approx(std::sqrt(var) / mean).epsilon(1e-14));
  CHECK(cv > 0.0);

  // A constant-embedding encoder erases the observation dependence, so every
  // normalizer coincides and the dispersion collapses.
  ee::RatioModel flat = m;
  for (Matrix& t : flat.enc_w.tensors)
    for (double& v : t.data) v = 0.0;
  flat.enc_w.tensors.back()(0, 1) = 1.0;
  CHECK(ee::normalizer_cv(flat, obs, prior, 200, 9) <= 1e-12);

  Matrix one(1, 3);
  CHECK_THROWS_AS(ee::normalizer_cv(m, one, prior, 200, 9), ee::DomainError);
}

TEST_CASE("redundancy sensitivity vanishes when the extra coordinate is ignored") {
  ee::RatioModel m;
  m.enc_spec = {2, 10, 1, 2};
  m.emu_spec = {3, 10, 1, 2};
  m.tau = 1.0;
  m.enc_w = ee::init_weights(m.enc_spec, 7);
  m.emu_w = ee::init_weights(m.emu_spec, 8);

  ee::Rng rng(41);
  Matrix grid(16, 2);
  for (double& v : grid.data) v = rng.uniform(-1.0, 1.0);
  const std::vector<double> sweep = {-1.0, -0.5, 0.0, 0.5, 1.0};

  const double before = ee::redundancy_sensitivity(m, grid, sweep);
  CHECK(before > 0.0);

  // Zero the first input row of the emulator: coordinate 0 can no longer move
  // the embedding, so the sweep collapses.
  Matrix& w_in = m.emu_w.tensors[0];
  for (int c = 0; c < w_in.cols; ++c) w_in(0, c) = 0.0;
  CHECK(ee::redundancy_sensitivity(m, grid, sweep) <= 1e-14);

  CHECK_THROWS_AS(ee::redundancy_sensitivity(m, Matrix(0, 2), sweep), ee::DomainError);
  CHECK_THROWS_AS(ee::redundancy_sensitivity(m, grid, {0.5}), ee::DomainError);
}

TEST_CASE("metric report carries the quartiles") {
  const ee::MetricReport r = ee::MetricReport::from_values("demo", {4.0, 2.0, 1.0, 3.0}, "cfg");
  CHECK(r.name == "demo");
  CHECK(r.p25 == 1.75);
  CHECK(r.median == 2.5);
  CHECK(r.p75 == 3.25);
  CHECK(r.values.size() == 4);
  CHECK(r.config_echo == "cfg");
}
