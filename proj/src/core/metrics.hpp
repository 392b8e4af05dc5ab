#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/network.hpp"
#include "core/prior.hpp"

namespace ee {

// Percentile by linear interpolation on the sorted values; p in [0, 100].
double percentile_linear(std::vector<double> values, double p);

struct MetricReport {
  std::string name;
  std::vector<double> values;
  double p25 = 0.0, median = 0.0, p75 = 0.0;
  std::string config_echo;

  static MetricReport from_values(std::string name, std::vector<double> values,
                                  std::string config_echo);
};

// Sum of absolute differences between two density-value lists evaluated on
// shared draws. Callers normalize the lists first when a [0, 2] posterior
// distance is wanted.
double l1_posterior_distance(const std::vector<double>& estimated,
                             const std::vector<double>& reference);

// Per-coordinate OLS fit (with intercept) of embedding ~ W source + b;
// returns the uniform average of the coordinate R^2 values.
double latent_recovery_r2(const Matrix& source, const Matrix& embedding);

// Biased V-statistic with diagonal terms, Gaussian kernel of width sigma.
double mmd_squared(const Matrix& a, const Matrix& b, double sigma);

// Coefficient of variation (population std over mean) of the Monte-Carlo
// normalizer across observations; all observations share one draw set.
double normalizer_cv(const RatioModel& model, const Matrix& observations, const PriorSpec& prior,
                     std::uint32_t draws, std::uint64_t seed);

// Max over effective-parameter grid points of the max pairwise embedding
// distance as the leading redundant coordinate sweeps `redundant_values`.
double redundancy_sensitivity(const RatioModel& model, const Matrix& effective_grid,
                              const std::vector<double>& redundant_values);

}  // namespace ee
