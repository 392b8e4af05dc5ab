#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ee {

// In-memory simulation dataset: (phi, y, seed) triples with fixed dims.
struct Dataset {
  std::uint32_t param_dim = 0;
  std::uint32_t obs_dim = 0;
  std::vector<double> params;  // count x param_dim, row-major
  std::vector<double> obs;     // count x obs_dim, row-major
  std::vector<std::uint64_t> seeds;

  std::uint64_t count() const { return seeds.size(); }
  const double* param_row(std::uint64_t i) const { return params.data() + i * param_dim; }
  const double* obs_row(std::uint64_t i) const { return obs.data() + i * obs_dim; }
  void append(const double* p, const double* o, std::uint64_t seed);
};

std::string manifest_path(const std::string& dataset_path);

// Binary layout (little-endian): magic "EESB", version u32, record count u64,
// param-dim u32, obs-dim u32, then per record param f64s, observation f64s,
// seed u64. The manifest text goes to a sidecar file next to the dataset.
void save_dataset(const Dataset& d, const std::string& path, const std::string& manifest_text);

// Loads the binary records; if the sidecar manifest exists its text is
// returned through manifest_out (empty string otherwise).
Dataset load_dataset(const std::string& path, std::string* manifest_out = nullptr);

}  // namespace ee
