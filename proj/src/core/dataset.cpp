#include "core/dataset.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace ee {

namespace {
constexpr char kMagic[4] = {'E', 'E', 'S', 'B'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void Dataset::append(const double* p, const double* o, std::uint64_t seed) {
  params.insert(params.end(), p, p + param_dim);
  obs.insert(obs.end(), o, o + obs_dim);
  seeds.push_back(seed);
}

std::string manifest_path(const std::string& dataset_path) { return dataset_path + ".manifest"; }

void save_dataset(const Dataset& d, const std::string& path, const std::string& manifest_text) {
  for (double v : d.params)
    if (!std::isfinite(v)) throw FormatError("dataset has a non-finite parameter value");
  for (double v : d.obs)
    if (!std::isfinite(v)) throw FormatError("dataset has a non-finite observation value");
  if (d.params.size() != d.count() * d.param_dim || d.obs.size() != d.count() * d.obs_dim)
    throw FormatError("dataset buffers are inconsistent with the declared dims");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot write dataset: " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u64(os, d.count());
  write_u32(os, d.param_dim);
  write_u32(os, d.obs_dim);
  for (std::uint64_t i = 0; i < d.count(); ++i) {
    write_f64_array(os, d.param_row(i), d.param_dim);
    write_f64_array(os, d.obs_row(i), d.obs_dim);
    write_u64(os, d.seeds[i]);
  }
  if (!os) throw RuntimeError("dataset write failed: " + path);
  os.close();
  write_text_file(manifest_path(path), manifest_text);
}

Dataset load_dataset(const std::string& path, std::string* manifest_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw RuntimeError("cannot open dataset: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("not a dataset file (bad magic): " + path);
  const std::uint32_t version = read_u32(is);
  if (version != kVersion)
    throw FormatError("unsupported dataset version " + std::to_string(version));
  const std::uint64_t count = read_u64(is);
  Dataset d;
  d.param_dim = read_u32(is);
  d.obs_dim = read_u32(is);
  if (d.param_dim == 0 || d.obs_dim == 0) throw FormatError("dataset declares zero dims");
  d.params.resize(count * d.param_dim);
  d.obs.resize(count * d.obs_dim);
  d.seeds.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    read_f64_array(is, d.params.data() + i * d.param_dim, d.param_dim);
    read_f64_array(is, d.obs.data() + i * d.obs_dim, d.obs_dim);
    d.seeds[i] = read_u64(is);
  }
  is.peek();
  if (!is.eof()) throw FormatError("trailing bytes after dataset records: " + path);

  if (manifest_out != nullptr) {
    manifest_out->clear();
    const std::string mpath = manifest_path(path);
    if (std::filesystem::exists(mpath)) *manifest_out = read_text_file(mpath);
  }
  return d;
}

}  // namespace ee
