#include "core/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ee {

namespace {

constexpr std::uint64_t kNormalizerStream = 0x4e4f524d;  // "NORM"
constexpr std::uint64_t kSampleStream = 0x53414d50;      // "SAMP"
constexpr std::uint64_t kCircleStream = 0x43495243;      // "CIRC"
constexpr int kCandidateChunk = 64;
constexpr std::uint64_t kAbortProposals = 1000000;
constexpr double kAbortRate = 1e-4;

Matrix row_matrix(const std::vector<double>& v) {
  Matrix m(1, static_cast<int>(v.size()));
  m.data = v;
  return m;
}

Matrix sample_matrix(const PriorSpec& prior, std::uint32_t count, Rng& rng) {
  const int dim = static_cast<int>(prior.dim());
  Matrix out(static_cast<int>(count), dim);
  for (std::uint32_t i = 0; i < count; ++i)
    prior.sample(rng, out.data.data() + static_cast<std::size_t>(i) * dim);
  return out;
}

double dot(const std::vector<double>& a, const double* b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double ratio_log(const RatioModel& model, const std::vector<double>& phi,
                 const std::vector<double>& data_embedding, double c_hat) {
  if (!(c_hat > 0.0)) throw DomainError("normalizer must be positive");
  const Matrix g = model.emulate(row_matrix(phi));
  return dot(data_embedding, g.data.data()) / model.tau - std::log(c_hat);
}

Matrix normalizer_draw_set(const PriorSpec& prior, std::uint32_t draws, std::uint64_t seed) {
  if (draws == 0) throw DomainError("normalizer needs at least one draw");
  Rng rng(Rng::stream(seed, kNormalizerStream, 0));
  return sample_matrix(prior, draws, rng);
}

double estimate_normalizer(const RatioModel& model, const std::vector<double>& y,
                           const PriorSpec& prior, std::uint32_t draws, std::uint64_t seed) {
  const Matrix f = model.encode(row_matrix(y));
  const Matrix params = normalizer_draw_set(prior, draws, seed);
  const Matrix g = model.emulate(params);
  double c = 0.0;
  for (std::size_t i = 0; i < g.rows; ++i) c += std::exp(row_dot(f, 0, g, i) / model.tau);
  return c;
}

PosteriorEstimate::PosteriorEstimate(const RatioModel& model, const std::vector<double>& y,
                                     const PriorSpec& prior, std::uint32_t normalizer_draws,
                                     std::uint64_t seed)
    : model_(&model), prior_(prior), n_draws_(normalizer_draws) {
  prior_.validate();
  if (normalizer_draws == 0) throw DomainError("normalizer needs at least one draw");
  if (prior_.dim() != model.emu_spec.input_dim)
    throw DomainError("prior dimension disagrees with the emulator input");
  const Matrix f = model.encode(row_matrix(y));  // the single encoder pass
  f_.assign(f.data.begin(), f.data.end());

  const Matrix params = normalizer_draw_set(prior_, normalizer_draws, seed);
  const Matrix g = model.emulate(params);
  for (std::size_t i = 0; i < g.rows; ++i) {
    const double w = std::exp(dot(f_, g.data.data() + static_cast<std::size_t>(i) * g.cols) /
                              model.tau);
    c_hat_ += w;
    max_weight_ = std::max(max_weight_, w);
  }
  if (!(c_hat_ > 0.0) || !std::isfinite(c_hat_))
    throw RuntimeError("normalizer estimate is not a positive finite number");
}

double PosteriorEstimate::ratio_log(const std::vector<double>& phi) const {
  return ee::ratio_log(*model_, phi, f_, c_hat_);
}

double PosteriorEstimate::density(const std::vector<double>& phi) const {
  const double p = prior_.density(phi.data());
  if (p == 0.0) return 0.0;
  const Matrix g = model_->emulate(row_matrix(phi));
  return n_draws_ / c_hat_ * std::exp(dot(f_, g.data.data()) / model_->tau) * p;
}

double PosteriorEstimate::density_altprior(const std::vector<double>& phi,
                                           const PriorSpec& alt_prior, std::uint32_t draws,
                                           std::uint64_t seed) const {
  alt_prior.validate();
  if (draws == 0) throw DomainError("alternative-prior normalizer needs at least one draw");
  if (alt_prior.dim() != prior_.dim())
    throw DomainError("alternative prior dimension mismatch");

  Rng rng(Rng::stream(seed, kNormalizerStream, 1));
  const Matrix params = sample_matrix(alt_prior, draws, rng);
  for (std::size_t i = 0; i < params.rows; ++i)
    if (!prior_.in_support(params.data.data() + static_cast<std::size_t>(i) * params.cols))
      throw DomainError("alternative prior support is not nested inside the inference prior");

  const Matrix g = model_->emulate(params);
  double c = 0.0;
  for (std::size_t i = 0; i < g.rows; ++i)
    c += std::exp(dot(f_, g.data.data() + static_cast<std::size_t>(i) * g.cols) / model_->tau);

  const double p_alt = alt_prior.density(phi.data());
  if (p_alt == 0.0) return 0.0;
  if (!prior_.in_support(phi.data()))
    throw DomainError("alternative prior support is not nested inside the inference prior");
  const Matrix gq = model_->emulate(row_matrix(phi));
  return draws / c * std::exp(dot(f_, gq.data.data()) / model_->tau) * p_alt;
}

SampleResult sample_posterior(const PosteriorEstimate& estimate, std::uint32_t count,
                              std::uint64_t seed, double envelope_b, const PriorSpec* proposal) {
  const PriorSpec& pi = proposal != nullptr ? *proposal : estimate.prior();
  pi.validate();
  if (pi.dim() != estimate.prior().dim()) throw DomainError("proposal dimension mismatch");
  const double b = envelope_b > 0.0 ? envelope_b : 1.5 * estimate.max_draw_ratio();
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("rejection envelope must be positive");

  const RatioModel& model = estimate.model();
  const int dim = static_cast<int>(pi.dim());
  const double scale = estimate.normalizer_draws() / estimate.normalizer();

  SampleResult result;
  result.samples = Matrix(static_cast<int>(count), dim);
  result.envelope_b = b;
  Rng rng(Rng::stream(seed, kSampleStream, 0));

  std::uint32_t accepted = 0;
  while (accepted < count) {
    // Never draw more candidates than acceptances still outstanding: every
    // emulated row is then actually tested, keeping the candidate count equal
    // to the emulator row count with no discarded tail.
    const std::uint32_t chunk_rows =
        std::min<std::uint32_t>(kCandidateChunk, count - accepted);
    const Matrix chunk = sample_matrix(pi, chunk_rows, rng);
    const Matrix g = model.emulate(chunk);
    const std::uint64_t base = result.candidates;
    result.candidates += chunk.rows;
    for (std::size_t i = 0; i < chunk.rows && accepted < count; ++i) {
      const double* phi = chunk.data.data() + static_cast<std::size_t>(i) * dim;
      const double ratio =
          scale * std::exp(dot(estimate.embedding(),
                               g.data.data() + static_cast<std::size_t>(i) * g.cols) /
                           model.tau);
      const double target = ratio * estimate.prior().density(phi);
      const double prop = pi.density(phi);
      double accept_p = target / (b * prop);
      if (accept_p > 1.0) {
        ++result.envelope_violations;
        accept_p = 1.0;
      }
      if (rng.uniform() <= accept_p) {
        std::copy(phi, phi + dim,
                  result.samples.data.data() + static_cast<std::size_t>(accepted) * dim);
        result.candidate_ordinals.push_back(base + i + 1);
        ++accepted;
      }
    }
    if (accepted < count && result.candidates >= kAbortProposals &&
        static_cast<double>(accepted) < kAbortRate * static_cast<double>(result.candidates)) {
      std::ostringstream msg;
      msg << "rejection sampling stalled: " << accepted << " accepted out of "
          << result.candidates << " proposals (envelope B = " << b
          << "); the envelope may be too large or the model badly misfit";
      throw RuntimeError(msg.str());
    }
  }
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(result.candidates);
  return result;
}

Matrix reference_circle_samples(const std::vector<double>& phi_center, const PriorSpec& prior,
                                std::uint32_t count, std::uint64_t seed) {
  if (phi_center.size() != 2 || prior.dim() != 2)
    throw DomainError("reference circle requires 2-d parameters");
  const double radius = std::hypot(phi_center[0], phi_center[1]);
  if (!(radius > 0.0)) throw DomainError("reference circle center must be nonzero");

  Matrix out(static_cast<int>(count), 2);
  Rng rng(Rng::stream(seed, kCircleStream, 0));
  const std::uint64_t max_tries =
      std::max<std::uint64_t>(100000, 1000ull * static_cast<std::uint64_t>(count));
  std::uint32_t kept = 0;
  for (std::uint64_t tries = 0; kept < count; ++tries) {
    if (tries >= max_tries)
      throw DomainError("reference circle lies outside the prior support");
    const double t = rng.uniform(0.0, 2.0 * M_PI);
    const double p[2] = {radius * std::cos(t), radius * std::sin(t)};
    if (!prior.in_support(p)) continue;
    out(kept, 0) = p[0];
    out(kept, 1) = p[1];
    ++kept;
  }
  return out;
}

}  // namespace ee
