#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/lorenz96.hpp"
#include "core/prior.hpp"
#include "core/synthetic.hpp"
#include "core/trainer.hpp"

namespace ee {

enum class SimKind { synthetic, lorenz };

// Everything a pipeline command needs, resolved from the sectioned key=value
// config text. Defaults depend on the simulator kind; unknown sections, keys,
// duplicates, and malformed values are all rejected.
struct RunConfig {
  std::string text;  // verbatim file contents, echoed into outputs

  SimKind kind = SimKind::synthetic;
  SyntheticModel synthetic;
  Lorenz96Model lorenz;
  PriorSpec prior;

  TrainConfig training;  // enc/emu specs and optimizer settings resolved

  // inference + evaluation section
  std::uint32_t normalizer_draws = 10000;  // N' behind each posterior estimate
  std::uint32_t sample_count = 100;        // S
  double envelope_inflation = 1.5;         // B = inflation * max draw ratio
  std::vector<double> mmd_sigmas = {0.01, 0.05};
  std::uint32_t l1_prior_draws = 10000;       // shared draws per l1 instance
  std::uint32_t mmd_sample_count = 100;       // posterior/reference samples per instance
  std::uint32_t redundancy_grid_points = 64;  // effective-parameter grid size
  std::uint32_t redundancy_sweep_points = 9;  // redundant-coordinate sweep size

  std::uint64_t seed = 0;
  std::uint32_t threads = 1;

  std::size_t obs_dim() const;
  std::size_t param_dim() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Canonical one-line-per-field rendering of the generating process (simulator
// plus prior). Datasets carry this in their manifest; train/eval compare it
// against the active config and refuse to run on a mismatch.
std::string describe_process(const RunConfig& cfg);

}  // namespace ee
