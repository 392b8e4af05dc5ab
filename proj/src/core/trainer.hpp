#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/matrix.hpp"
#include "core/network.hpp"
#include "core/prior.hpp"

namespace ee {

// Cosine decay: initial_lr * 0.5 * (1 + cos(pi * step / total_steps)).
double lr_schedule(std::uint64_t step, std::uint64_t total_steps, double initial_lr);

// Decoupled-weight-decay Adam. Moments are lazily initialized on the first
// step; beta = (0.9, 0.999), eps = 1e-8.
struct AdamWState {
  std::vector<Matrix> m, v;
  std::uint64_t t = 0;
};
void adamw_step(const std::vector<Matrix*>& weights, const std::vector<const Matrix*>& grads,
                AdamWState& state, double lr, double weight_decay);

// Produces an augmented observation for record `row` (same parameters, fresh
// randomness keyed by epoch). Required when intra_weight > 0.
using AugmentFn =
    std::function<std::vector<double>(const Dataset& ds, std::uint64_t row, std::uint64_t epoch)>;

struct TrainConfig {
  NetworkSpec enc_spec, emu_spec;
  LossMode loss_mode = LossMode::sym;
  double tau = 1.0;
  double intra_weight = 0.0;
  std::uint32_t bank_capacity = 0;
  std::uint32_t epochs = 1;
  std::uint32_t batch_size = 128;  // capped at the dataset size
  double learning_rate = 1e-3;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;
  std::uint32_t val_interval = 10;            // epochs between validation passes
  std::uint32_t val_normalizer_draws = 2000;  // prior draws behind the validation density
  std::string log_path;                       // per-epoch CSV when nonempty
  std::string log_preamble;                   // written as '#' comments above the header
  std::string note;                           // carried into checkpoint metadata

  void validate() const;
};

struct EpochRecord {
  std::uint32_t epoch = 0;
  double train_loss = 0.0;
  double val_score = 0.0;  // NaN on epochs without a validation pass
  double lr = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  RatioModel model;  // weights from the best validation epoch
  std::uint32_t best_epoch = 0;
  double best_score = 0.0;
  std::vector<EpochRecord> history;
};

// Posterior density of the model at each matched validation pair, sharing
// one emulated normalizer draw set across instances.
std::vector<double> validation_densities(const RatioModel& model, const Dataset& val,
                                         const PriorSpec& prior, const Matrix& normalizer_params);
// Sum of the per-pair densities (the validation objective; selection uses
// the median of the same values).
double validation_score(const RatioModel& model, const Dataset& val, const PriorSpec& prior,
                        const Matrix& normalizer_params);

// Minibatch training of the encoder/emulator pair. Deterministic given the
// config: shuffling, init, and validation draws all derive from cfg.seed.
// Keeps the checkpoint with the highest median validation density, later
// epochs winning ties.
TrainResult train(const Dataset& train_ds, const Dataset& val_ds, const PriorSpec& prior,
                  const TrainConfig& cfg, const AugmentFn& augment = {});

}  // namespace ee
