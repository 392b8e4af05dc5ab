#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/metrics.hpp"
#include "core/trainer.hpp"

namespace ee {

// End-to-end stages behind the command-line verbs. Every stage takes the full
// run configuration, writes its artifacts to explicit paths, and returns a
// small summary for the caller to print. All randomness flows from cfg.seed.

struct SimulateOutcome {
  std::uint64_t count = 0;
  std::size_t param_dim = 0;
  std::size_t obs_dim = 0;
  std::string dataset_path;
};

// Draws `count` parameters from the prior, runs the simulator on each, and
// writes the dataset plus a sidecar manifest describing the generating
// process. Deterministic for a fixed (config, count) regardless of threads.
SimulateOutcome run_simulate(const RunConfig& cfg, std::uint64_t count, const std::string& out_path);

struct TrainOutcome {
  TrainResult result;
  std::string checkpoint_path;
  std::string log_path;
};

// Trains encoder and emulator on the dataset at `data_path`, scoring
// checkpoints against `val_path`, and writes the best model to `ckpt_path`
// with a CSV training log next to it. The dataset manifests must describe the
// same process as the config.
TrainOutcome run_train(const RunConfig& cfg, const std::string& data_path,
                       const std::string& val_path, const std::string& ckpt_path);

struct InferOutcome {
  std::uint64_t samples = 0;
  std::uint64_t candidates = 0;
  double normalizer = 0.0;
  double envelope_b = 0.0;
  double acceptance_rate = 0.0;
  std::uint64_t envelope_violations = 0;
  std::string samples_path;
};

// Reconstructs the posterior for observation `index` of the dataset at
// `obs_path` using the model at `ckpt_path` and writes `sample_count`
// posterior draws as CSV. `prior_override`, when nonempty, must parse as a
// run configuration whose prior is nested inside the training prior; samples
// are then drawn under that restricted prior.
InferOutcome run_infer(const RunConfig& cfg, const std::string& ckpt_path,
                       const std::string& obs_path, std::uint64_t index,
                       std::uint32_t sample_count, const std::string& out_path,
                       const std::string& prior_override_text = "");

// Scores the model at `ckpt_path` against the held-out dataset at `test_path`.
// Supported metric names: l1, r2, mmd, cv, redundancy. Metrics that need
// ground truth unavailable for the configured simulator raise UsageError.
std::vector<MetricReport> run_eval(const RunConfig& cfg, const std::string& ckpt_path,
                                   const std::string& test_path,
                                   const std::vector<std::string>& metrics,
                                   const std::string& out_path);

// Renders metric reports as the CSV written by run_eval.
std::string render_reports(const std::vector<MetricReport>& reports, const std::string& config_echo);

}  // namespace ee
