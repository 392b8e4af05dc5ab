#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/posterior.hpp"

namespace ee {

double percentile_linear(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("percentile of an empty list");
  if (p < 0.0 || p > 100.0) throw DomainError("percentile rank must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lower = static_cast<std::size_t>(rank);
  if (lower + 1 >= values.size()) return values.back();
  const double frac = rank - static_cast<double>(lower);
  return values[lower] * (1.0 - frac) + values[lower + 1] * frac;
}

MetricReport MetricReport::from_values(std::string name, std::vector<double> values,
                                       std::string config_echo) {
  MetricReport r;
  r.name = std::move(name);
  r.p25 = percentile_linear(values, 25.0);
  r.median = percentile_linear(values, 50.0);
  r.p75 = percentile_linear(values, 75.0);
  r.values = std::move(values);
  r.config_echo = std::move(config_echo);
  return r;
}

double l1_posterior_distance(const std::vector<double>& estimated,
                             const std::vector<double>& reference) {
  if (estimated.size() != reference.size() || estimated.empty())
    throw DomainError("l1 distance needs matching nonempty value lists");
  double total = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i)
    total += std::abs(estimated[i] - reference[i]);
  return total;
}

namespace {

// Solves the symmetric system M x = rhs by Gaussian elimination with partial
// pivoting; throws on (near-)singular M.
std::vector<double> solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-12)
      throw DomainError("degenerate regression source: constant or collinear coordinates");
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= m[i][i];
  return rhs;
}

}  // namespace

double latent_recovery_r2(const Matrix& source, const Matrix& embedding) {
  if (source.rows != embedding.rows || source.rows < 2)
    throw DomainError("regression needs matching sample counts of at least 2");
  const int n = source.rows, ds = source.cols, de = embedding.cols;
  const std::size_t k = static_cast<std::size_t>(ds) + 1;  // weights plus intercept

  // Normal equations X^T X with X = [source | 1].
  std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < n; ++i)
    for (std::size_t a = 0; a < k; ++a) {
      const double xa = a < static_cast<std::size_t>(ds) ? source(i, static_cast<int>(a)) : 1.0;
      for (std::size_t b = 0; b < k; ++b) {
        const double xb = b < static_cast<std::size_t>(ds) ? source(i, static_cast<int>(b)) : 1.0;
        xtx[a][b] += xa * xb;
      }
    }

  double r2_sum = 0.0;
  for (int c = 0; c < de; ++c) {
    std::vector<double> xty(k, 0.0);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = embedding(i, c);
      mean += y;
      for (std::size_t a = 0; a < k; ++a)
        xty[a] += (a < static_cast<std::size_t>(ds) ? source(i, static_cast<int>(a)) : 1.0) * y;
    }
    mean /= n;
    const std::vector<double> beta = solve_dense(xtx, xty);
    double ssr = 0.0, sst = 0.0;
    for (int i = 0; i < n; ++i) {
      double fit = beta[k - 1];
      for (int a = 0; a < ds; ++a) fit += beta[a] * source(i, a);
      const double y = embedding(i, c);
      ssr += (y - fit) * (y - fit);
      sst += (y - mean) * (y - mean);
    }
    if (sst <= 0.0)
      r2_sum += ssr <= 1e-20 ? 1.0 : 0.0;  // constant target: perfect or useless fit
    else
      r2_sum += 1.0 - ssr / sst;
  }
  return r2_sum / de;
}

double mmd_squared(const Matrix& a, const Matrix& b, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("mmd kernel width must be positive");
  if (a.rows == 0 || b.rows == 0 || a.cols != b.cols)
    throw DomainError("mmd needs nonempty sample sets of matching dimension");
  const std::size_t d = a.cols;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  // Biased V-statistic: diagonal terms stay in, so the value is nonnegative.
  auto kernel_mean = [&](const Matrix& x, const Matrix& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t j = 0; j < y.rows; ++j) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = x(i, c) - y(j, c);
          d2 += diff * diff;
        }
        s += std::exp(-d2 * inv);
      }
    return s / (static_cast<double>(x.rows) * static_cast<double>(y.rows));
  };
  return kernel_mean(a, a) - 2.0 * kernel_mean(a, b) + kernel_mean(b, b);
}

double normalizer_cv(const RatioModel& model, const Matrix& observations, const PriorSpec& prior,
                     std::uint32_t draws, std::uint64_t seed) {
  if (observations.rows < 2) throw DomainError("normalizer cv needs at least two observations");
  prior.validate();

  // One estimate per observation over a shared draw set, so the spread
  // measures the model, not the Monte Carlo. Batched: the parameters are
  // emulated once instead of once per observation, which matches the
  // per-observation estimate bit for bit because rows pass through the
  // networks independently.
  const Matrix params = normalizer_draw_set(prior, draws, seed);
  const Matrix g = model.emulate(params);
  const Matrix f = model.encode(observations);
  std::vector<double> c(observations.rows, 0.0);
  for (std::size_t v = 0; v < observations.rows; ++v)
    for (std::size_t i = 0; i < g.rows; ++i)
      c[v] += std::exp(row_dot(f, v, g, i) / model.tau);

  double mean = 0.0;
  for (double x : c) mean += x;
  mean /= c.size();
  double var = 0.0;
  for (double x : c) var += (x - mean) * (x - mean);
  var /= c.size();
  return std::sqrt(var) / mean;
}

double redundancy_sensitivity(const RatioModel& model, const Matrix& effective_grid,
                              const std::vector<double>& redundant_values) {
  if (effective_grid.rows == 0 || redundant_values.size() < 2)
    throw DomainError("redundancy sweep needs grid points and at least two redundant values");
  const int d_eff = effective_grid.cols;
  const int r = static_cast<int>(redundant_values.size());
  double worst = 0.0;
  for (std::size_t gidx = 0; gidx < effective_grid.rows; ++gidx) {
    Matrix params(r, d_eff + 1);
    for (int i = 0; i < r; ++i) {
      params(i, 0) = redundant_values[i];
      for (int c = 0; c < d_eff; ++c) params(i, c + 1) = effective_grid(gidx, c);
    }
    const Matrix emb = model.emulate(params);
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < emb.cols; ++c) {
          const double diff = emb(i, c) - emb(j, c);
          d2 += diff * diff;
        }
        worst = std::max(worst, std::sqrt(d2));
      }
  }
  return worst;
}

}  // namespace ee
