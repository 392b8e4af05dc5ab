#pragma once

#include <cstdint>
#include <vector>

#include "core/matrix.hpp"
#include "core/network.hpp"
#include "core/prior.hpp"

namespace ee {

// log ratio = f.g(phi)/tau - log c_hat, with the caller-supplied cached data
// embedding. One emulator row, zero encoder passes.
double ratio_log(const RatioModel& model, const std::vector<double>& phi,
                 const std::vector<double>& data_embedding, double c_hat);

// The exact parameter draws estimate_normalizer consumes for a given
// (prior, draws, seed); shared so batched consumers reproduce it bit for bit.
Matrix normalizer_draw_set(const PriorSpec& prior, std::uint32_t draws, std::uint64_t seed);

// Bare-sum Monte-Carlo normalizer over `draws` prior samples:
//   c_hat = sum_i exp(f.g(phi_i)/tau).
// Densities downstream carry the explicit draws/c_hat factor so they do not
// scale with the draw count.
double estimate_normalizer(const RatioModel& model, const std::vector<double>& y,
                           const PriorSpec& prior, std::uint32_t draws, std::uint64_t seed);

// Per-observation inference state. Construction runs the encoder exactly
// once, draws the normalizer set from the prior, and remembers the per-draw
// importance weights for the default rejection envelope.
class PosteriorEstimate {
public:
  PosteriorEstimate(const RatioModel& model, const std::vector<double>& y,
                    const PriorSpec& prior, std::uint32_t normalizer_draws, std::uint64_t seed);

  double ratio_log(const std::vector<double>& phi) const;
  // (draws / c_hat) * exp(f.g/tau) * p(phi); zero outside the prior support.
  double density(const std::vector<double>& phi) const;
  // Reweighting under an alternative prior whose support must nest inside
  // the inference prior's: exp(f.g/tau) * p_alt(phi), renormalized by a
  // fresh Monte-Carlo sum over draws from p_alt.
  double density_altprior(const std::vector<double>& phi, const PriorSpec& alt_prior,
                          std::uint32_t draws, std::uint64_t seed) const;

  const RatioModel& model() const { return *model_; }
  const PriorSpec& prior() const { return prior_; }
  const std::vector<double>& embedding() const { return f_; }
  double normalizer() const { return c_hat_; }
  std::uint32_t normalizer_draws() const { return n_draws_; }
  // max over the normalizer draws of the self-normalized ratio n'*w_i/c_hat.
  double max_draw_ratio() const { return max_weight_ * n_draws_ / c_hat_; }

private:
  const RatioModel* model_;
  PriorSpec prior_;
  std::vector<double> f_;
  double c_hat_ = 0.0;
  double max_weight_ = 0.0;
  std::uint32_t n_draws_ = 0;
};

struct SampleResult {
  Matrix samples;                                // count x param_dim accepted draws
  std::vector<std::uint64_t> candidate_ordinals;  // 1-based candidate index per sample
  std::uint64_t candidates = 0;                   // total proposals drawn (= emulator rows)
  double envelope_b = 0.0;
  double acceptance_rate = 0.0;
  std::uint64_t envelope_violations = 0;          // candidates whose ratio exceeded B
};

// Acceptance-rejection sampling with the prior as default proposal. Accepts
// phi with probability ratio*p(phi) / (B * proposal(phi)); envelope_b <= 0
// selects the default B = 1.5 * max_draw_ratio(). Aborts when the acceptance
// rate stays below 1e-4 after 1e6 proposals. No encoder passes.
SampleResult sample_posterior(const PosteriorEstimate& estimate, std::uint32_t count,
                              std::uint64_t seed, double envelope_b = 0.0,
                              const PriorSpec* proposal = nullptr);

// Uniform-angle samples of radius |phi_center| kept inside the prior's
// support; errors when the circle misses the support entirely.
Matrix reference_circle_samples(const std::vector<double>& phi_center, const PriorSpec& prior,
                                std::uint32_t count, std::uint64_t seed);

}  // namespace ee
