#include "core/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/vmf.hpp"

namespace ee {

namespace {

constexpr double kSlope = 0.2;
// Clamping the singular values to a log-symmetric band around one keeps every
// layer well conditioned (<= 1.5625) and the composed map near scale 1, so the
// inverse stays learnable. A wider band lets the six-layer product collapse
// the observation curve to a near-degenerate sliver.
constexpr double kSvMin = 0.8;
constexpr double kSvMax = 1.25;

void mat2_vec(const double m[4], const double x[2], double out[2]) {
  out[0] = m[0] * x[0] + m[1] * x[1];
  out[1] = m[2] * x[0] + m[3] * x[1];
}

void mat2_inv(const double m[4], double inv[4]) {
  const double d = m[0] * m[3] - m[1] * m[2];
  if (std::abs(d) < 1e-300) throw DomainError("singular 2x2 matrix");
  inv[0] = m[3] / d;
  inv[1] = -m[1] / d;
  inv[2] = -m[2] / d;
  inv[3] = m[0] / d;
}

}  // namespace

void svd2x2(const double m[4], double u[4], double s[2], double v[4]) {
  // Eigendecomposition of m^T m gives V and the squared singular values.
  const double p = m[0] * m[0] + m[2] * m[2];
  const double q = m[0] * m[1] + m[2] * m[3];
  const double r = m[1] * m[1] + m[3] * m[3];
  const double half_tr = 0.5 * (p + r);
  const double disc = std::sqrt(std::max(0.0, 0.25 * (p - r) * (p - r) + q * q));
  const double lam1 = half_tr + disc;
  const double lam2 = std::max(0.0, half_tr - disc);
  s[0] = std::sqrt(lam1);
  s[1] = std::sqrt(lam2);

  double v1[2];
  if (std::abs(q) > 1e-14 * std::max(1.0, std::abs(p - r))) {
    v1[0] = q;
    v1[1] = lam1 - p;
  } else if (p >= r) {
    v1[0] = 1.0;
    v1[1] = 0.0;
  } else {
    v1[0] = 0.0;
    v1[1] = 1.0;
  }
  const double n1 = std::sqrt(v1[0] * v1[0] + v1[1] * v1[1]);
  v1[0] /= n1;
  v1[1] /= n1;
  const double v2[2] = {-v1[1], v1[0]};
  v[0] = v1[0];
  v[1] = v2[0];
  v[2] = v1[1];
  v[3] = v2[1];

  for (int i = 0; i < 2; ++i) {
    const double vi[2] = {v[0 + i], v[2 + i]};
    double mv[2];
    mat2_vec(m, vi, mv);
    const double si = s[i];
    if (si > 1e-300) {
      u[0 + i] = mv[0] / si;
      u[2 + i] = mv[1] / si;
    } else {
      // Null singular direction: pick any unit vector orthogonal to column 0.
      u[0 + i] = -u[2 + (1 - i)];
      u[2 + i] = u[0 + (1 - i)];
    }
  }
}

SyntheticModel SyntheticModel::create(double kappa, const double a[4], std::uint64_t decoder_seed,
                                      bool redundant) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("synthetic kappa must be finite and >= 0");
  SyntheticModel m;
  m.kappa = kappa;
  for (int i = 0; i < 4; ++i) m.a[i] = a[i];
  if (std::abs(m.a[0] * m.a[3] - m.a[1] * m.a[2]) < 1e-12)
    throw ConfigError("synthetic transform A is singular");
  m.decoder_seed = decoder_seed;
  m.redundant = redundant;

  Rng rng = Rng::stream(decoder_seed, 0x5dec0de5ULL, 0);
  m.layers.resize(6);
  for (auto& w : m.layers) {
    double raw[4], u[4], s[2], v[4];
    for (;;) {
      for (double& x : raw) x = rng.normal();
      svd2x2(raw, u, s, v);
      if (s[1] > 1e-6) break;  // redraw near-singular matrices
    }
    const double s0 = std::clamp(s[0], kSvMin, kSvMax);
    const double s1 = std::clamp(s[1], kSvMin, kSvMax);
    // w = u * diag(s') * v^T
    w[0] = s0 * u[0] * v[0] + s1 * u[1] * v[1];
    w[1] = s0 * u[0] * v[2] + s1 * u[1] * v[3];
    w[2] = s0 * u[2] * v[0] + s1 * u[3] * v[1];
    w[3] = s0 * u[2] * v[2] + s1 * u[3] * v[3];
  }
  return m;
}

void SyntheticModel::decode(const double z[2], double y[2]) const {
  double h[2] = {z[0], z[1]};
  for (int k = 0; k < 5; ++k) {
    double t[2];
    mat2_vec(layers[k].data(), h, t);
    h[0] = t[0] >= 0.0 ? t[0] : kSlope * t[0];
    h[1] = t[1] >= 0.0 ? t[1] : kSlope * t[1];
  }
  mat2_vec(layers[5].data(), h, y);
}

void SyntheticModel::decode_inverse(const double y[2], double z[2]) const {
  double inv[4];
  mat2_inv(layers[5].data(), inv);
  double h[2];
  mat2_vec(inv, y, h);
  for (int k = 4; k >= 0; --k) {
    h[0] = h[0] >= 0.0 ? h[0] : h[0] / kSlope;
    h[1] = h[1] >= 0.0 ? h[1] : h[1] / kSlope;
    mat2_inv(layers[k].data(), inv);
    double t[2];
    mat2_vec(inv, h, t);
    h[0] = t[0];
    h[1] = t[1];
  }
  z[0] = h[0];
  z[1] = h[1];
}

void SyntheticModel::true_g(const double* phi, double g[2]) const {
  const double* eff = redundant ? phi + 1 : phi;
  mat2_vec(a, eff, g);
}

void SyntheticModel::generate(const double* phi, Rng& rng, double y[2], double z[2]) const {
  double g[2];
  true_g(phi, g);
  const double n = std::sqrt(g[0] * g[0] + g[1] * g[1]);
  if (std::abs(n - 1.0) > 1e-6) throw DomainError("synthetic generate: phi is off the prior support");
  sample_vmf_circle(g, kappa, rng, z);
  decode(z, y);
}

PriorSpec SyntheticModel::prior() const {
  PriorSpec p;
  p.kind = PriorKind::transformed_circle;
  for (int i = 0; i < 4; ++i) p.a[i] = a[i];
  p.redundant = redundant;
  return p;
}

SyntheticTruePosterior::SyntheticTruePosterior(const SyntheticModel& model, const double y[2],
                                               int grid_n)
    : model_(model) {
  model.decode_inverse(y, f_);
  const PriorSpec prior = model.prior();
  const double prior_density = std::abs(prior.det_a()) / (2.0 * M_PI);
  const double dmu = (2.0 * M_PI / grid_n) / std::abs(prior.det_a());
  double z = 0.0;
  for (int i = 0; i < grid_n; ++i) {
    const double t = 2.0 * M_PI * (i + 0.5) / grid_n;
    const double dot = f_[0] * std::cos(t) + f_[1] * std::sin(t);
    z += std::exp(model.kappa * dot) * prior_density * dmu;
  }
  z_norm_ = z;
}

double SyntheticTruePosterior::log_kernel(const double* phi) const {
  double g[2];
  model_.true_g(phi, g);
  return model_.kappa * (f_[0] * g[0] + f_[1] * g[1]);
}

double SyntheticTruePosterior::density(const double* phi) const {
  const PriorSpec prior = model_.prior();
  const double p = prior.density(phi);
  if (p == 0.0) return 0.0;
  return std::exp(log_kernel(phi)) * p / z_norm_;
}

}  // namespace ee
