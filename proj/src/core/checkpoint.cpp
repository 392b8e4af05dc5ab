#include "core/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace ee {

namespace {

constexpr char kMagic[4] = {'E', 'E', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_spec(std::ostream& os, const NetworkSpec& s) {
  write_u32(os, s.input_dim);
  write_u32(os, s.hidden_width);
  write_u32(os, s.block_count);
  write_u32(os, s.embedding_dim);
  write_f64(os, s.activation_slope);
}

NetworkSpec read_spec(std::istream& is) {
  NetworkSpec s;
  s.input_dim = read_u32(is);
  s.hidden_width = read_u32(is);
  s.block_count = read_u32(is);
  s.embedding_dim = read_u32(is);
  s.activation_slope = read_f64(is);
  return s;
}

void write_weights(std::ostream& os, const MlpWeights& w) {
  for (const Matrix& t : w.tensors) {
    write_u32(os, static_cast<std::uint32_t>(t.rows));
    write_u32(os, static_cast<std::uint32_t>(t.cols));
    write_f64_array(os, t.data.data(), t.size());
  }
}

MlpWeights read_weights(std::istream& is, const NetworkSpec& spec) {
  MlpWeights w;
  for (std::size_t i = 0; i < spec.tensor_count(); ++i) {
    const std::uint32_t rows = read_u32(is);
    const std::uint32_t cols = read_u32(is);
    if (rows == 0 || cols == 0) throw FormatError("checkpoint tensor with zero dimension");
    Matrix t(rows, cols);
    read_f64_array(is, t.data.data(), t.size());
    w.tensors.push_back(std::move(t));
  }
  return w;
}

void check_weight_shapes(const NetworkSpec& spec, const MlpWeights& w) {
  std::vector<std::pair<std::size_t, std::size_t>> want;
  want.push_back({spec.input_dim, spec.hidden_width});
  want.push_back({1, spec.hidden_width});
  for (std::uint32_t b = 0; b < spec.block_count; ++b)
    for (int i = 0; i < 2; ++i) {
      want.push_back({spec.hidden_width, spec.hidden_width});
      want.push_back({1, spec.hidden_width});
    }
  want.push_back({spec.hidden_width, spec.embedding_dim});
  want.push_back({1, spec.embedding_dim});
  if (w.tensors.size() != want.size())
    throw FormatError("checkpoint tensor count disagrees with its network spec");
  for (std::size_t i = 0; i < want.size(); ++i)
    if (w.tensors[i].rows != want[i].first || w.tensors[i].cols != want[i].second)
      throw FormatError("checkpoint tensor shape disagrees with its network spec");
}

}  // namespace

void save_checkpoint(const RatioModel& model, const std::string& path) {
  check_weight_shapes(model.enc_spec, model.enc_w);
  check_weight_shapes(model.emu_spec, model.emu_w);
  std::ostringstream buf(std::ios::binary);
  buf.write(kMagic, 4);
  write_u32(buf, kVersion);
  write_f64(buf, model.tau);
  write_spec(buf, model.enc_spec);
  write_spec(buf, model.emu_spec);
  write_u32(buf, static_cast<std::uint32_t>(model.meta.loss_mode));
  write_f64(buf, model.meta.intra_weight);
  write_u32(buf, model.meta.bank_capacity);
  write_u32(buf, model.meta.epochs);
  write_u64(buf, model.meta.seed);
  write_u32(buf, static_cast<std::uint32_t>(model.meta.note.size()));
  buf.write(model.meta.note.data(), static_cast<std::streamsize>(model.meta.note.size()));
  write_u32(buf, static_cast<std::uint32_t>(model.enc_w.tensors.size() + model.emu_w.tensors.size()));
  write_weights(buf, model.enc_w);
  write_weights(buf, model.emu_w);

  const std::string bytes = buf.str();
  const std::uint32_t crc = Crc32::of(bytes.data(), bytes.size());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot write checkpoint: " + path);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  write_u32(os, crc);
  if (!os) throw RuntimeError("checkpoint write failed: " + path);
}

RatioModel load_checkpoint(const std::string& path) {
  std::string bytes;
  {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw RuntimeError("cannot open checkpoint: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    bytes = ss.str();
  }
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("not a checkpoint file (bad magic): " + path);
  const std::string payload = bytes.substr(0, bytes.size() - 4);
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes.data() + bytes.size() - 4, 4);
  if (Crc32::of(payload.data(), payload.size()) != stored_crc)
    throw FormatError("checkpoint CRC mismatch (corrupt file): " + path);

  std::istringstream is(payload, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  const std::uint32_t version = read_u32(is);
  if (version != kVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version));

  RatioModel m;
  m.tau = read_f64(is);
  m.enc_spec = read_spec(is);
  m.emu_spec = read_spec(is);
  m.enc_spec.validate();
  m.emu_spec.validate();
  m.meta.loss_mode = static_cast<LossMode>(read_u32(is));
  m.meta.intra_weight = read_f64(is);
  m.meta.bank_capacity = read_u32(is);
  m.meta.epochs = read_u32(is);
  m.meta.seed = read_u64(is);
  const std::uint32_t note_len = read_u32(is);
  m.meta.note.resize(note_len);
  if (note_len > 0) {
    is.read(m.meta.note.data(), note_len);
    if (!is) throw FormatError("truncated checkpoint metadata");
  }
  const std::uint32_t n_tensors = read_u32(is);
  if (n_tensors != m.enc_spec.tensor_count() + m.emu_spec.tensor_count())
    throw FormatError("checkpoint tensor count disagrees with the network specs");
  m.enc_w = read_weights(is, m.enc_spec);
  m.emu_w = read_weights(is, m.emu_spec);
  check_weight_shapes(m.enc_spec, m.enc_w);
  check_weight_shapes(m.emu_spec, m.emu_w);
  is.peek();
  if (!is.eof()) throw FormatError("trailing bytes in checkpoint: " + path);
  if (!(m.tau > 0.0)) throw FormatError("checkpoint temperature must be positive");
  return m;
}

}  // namespace ee
