#include "core/network.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ee {

void NetworkSpec::validate() const {
  if (input_dim == 0 || hidden_width == 0 || embedding_dim == 0)
    throw ConfigError("network dims must be positive");
  if (embedding_dim < 2) throw ConfigError("embedding dim must be at least 2 for a hypersphere");
  if (!(activation_slope > 0.0) || activation_slope >= 1.0)
    throw ConfigError("activation slope must lie in (0, 1)");
}

namespace {

Matrix he_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  Matrix w(fan_in, fan_out);
  for (double& v : w.data) v = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

MlpWeights init_weights(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  MlpWeights w;
  w.tensors.push_back(he_uniform(spec.input_dim, spec.hidden_width, rng));
  w.tensors.push_back(Matrix(1, spec.hidden_width));
  for (std::uint32_t b = 0; b < spec.block_count; ++b) {
    w.tensors.push_back(he_uniform(spec.hidden_width, spec.hidden_width, rng));
    w.tensors.push_back(Matrix(1, spec.hidden_width));
    // The closing matrix of each residual branch starts at zero, so the whole
    // network is linear at initialization. Normalized 2-d embeddings of a
    // linear map always wind once around the sphere; starting from a generic
    // nonlinear map often folds the embedding (winding zero), a defect
    // gradient descent cannot repair later.
    w.tensors.push_back(Matrix(spec.hidden_width, spec.hidden_width));
    w.tensors.push_back(Matrix(1, spec.hidden_width));
  }
  w.tensors.push_back(he_uniform(spec.hidden_width, spec.embedding_dim, rng));
  w.tensors.push_back(Matrix(1, spec.embedding_dim));

  // With the residual branches zeroed the initial map is the linear map
  // W_in W_out, and for 2-d embeddings the orientation of its trailing
  // 2x2 input minor fixes the winding direction of the initial embedding
  // around the circle. Canonicalize it to positive so two heads trained
  // against each other start with the same orientation instead of a coin
  // flip. Negating one output column preserves the init distribution (the
  // uniform law is symmetric).
  if (spec.input_dim >= 2 && spec.embedding_dim == 2) {
    Matrix& win = w.tensors.front();
    Matrix& wout = w.tensors[w.tensors.size() - 2];
    const std::size_t r0 = spec.input_dim - 2, r1 = spec.input_dim - 1;
    // Inputs ahead of the trailing pair start damped and are grown by
    // training. Their full-scale action shifts the initial embedding ellipse
    // away from the origin, and once the shift exceeds the ellipse radius the
    // embedding starts folded no matter how it is oriented. A tenth of the
    // usual scale keeps the shift well inside the ellipse while leaving every
    // input with a live, nonzero influence.
    for (std::size_t r = 0; r < r0; ++r)
      for (std::size_t hh = 0; hh < spec.hidden_width; ++hh) win(r, hh) *= 0.1;
    double c[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t h = 0; h < spec.hidden_width; ++h) {
      c[0] += win(r0, h) * wout(h, 0);
      c[1] += win(r0, h) * wout(h, 1);
      c[2] += win(r1, h) * wout(h, 0);
      c[3] += win(r1, h) * wout(h, 1);
    }
    if (c[0] * c[3] - c[1] * c[2] < 0.0)
      for (std::size_t h = 0; h < spec.hidden_width; ++h) wout(h, 1) = -wout(h, 1);
  }
  return w;
}

Matrix mlp_forward(const NetworkSpec& spec, const MlpWeights& w, const Matrix& x) {
  if (x.cols != spec.input_dim) throw DomainError("network input width mismatch");
  if (w.tensors.size() != spec.tensor_count()) throw DomainError("weight tensor count mismatch");
  std::size_t t = 0;
  Matrix h = add_rowvec(matmul(x, w.tensors[t]), w.tensors[t + 1]);
  t += 2;
  for (std::uint32_t b = 0; b < spec.block_count; ++b) {
    Matrix inner = leaky_relu(add_rowvec(matmul(h, w.tensors[t]), w.tensors[t + 1]),
                              spec.activation_slope);
    Matrix outer = add_rowvec(matmul(inner, w.tensors[t + 2]), w.tensors[t + 3]);
    h = add(h, outer);
    t += 4;
  }
  Matrix out = add_rowvec(matmul(h, w.tensors[t]), w.tensors[t + 1]);
  return row_normalize(out);
}

Tape::NodeId mlp_forward_tape(Tape& tape, const NetworkSpec& spec,
                              const std::vector<Tape::NodeId>& weight_nodes, Tape::NodeId x) {
  if (weight_nodes.size() != spec.tensor_count()) throw DomainError("weight node count mismatch");
  std::size_t t = 0;
  Tape::NodeId h = tape.add_rowvec(tape.matmul(x, weight_nodes[t]), weight_nodes[t + 1]);
  t += 2;
  for (std::uint32_t b = 0; b < spec.block_count; ++b) {
    Tape::NodeId inner = tape.leaky_relu(
        tape.add_rowvec(tape.matmul(h, weight_nodes[t]), weight_nodes[t + 1]),
        spec.activation_slope);
    Tape::NodeId outer = tape.add_rowvec(tape.matmul(inner, weight_nodes[t + 2]), weight_nodes[t + 3]);
    h = tape.add(h, outer);
    t += 4;
  }
  Tape::NodeId out = tape.add_rowvec(tape.matmul(h, weight_nodes[t]), weight_nodes[t + 1]);
  return tape.row_normalize(out);
}

RatioModel::RatioModel(const RatioModel& o)
    : enc_spec(o.enc_spec),
      emu_spec(o.emu_spec),
      enc_w(o.enc_w),
      emu_w(o.emu_w),
      tau(o.tau),
      meta(o.meta),
      encoder_rows_(o.encoder_rows_.load()),
      emulator_rows_(o.emulator_rows_.load()) {}

RatioModel& RatioModel::operator=(const RatioModel& o) {
  if (this == &o) return *this;
  enc_spec = o.enc_spec;
  emu_spec = o.emu_spec;
  enc_w = o.enc_w;
  emu_w = o.emu_w;
  tau = o.tau;
  meta = o.meta;
  encoder_rows_.store(o.encoder_rows_.load());
  emulator_rows_.store(o.emulator_rows_.load());
  return *this;
}

Matrix RatioModel::encode(const Matrix& y) const {
  encoder_rows_.fetch_add(y.rows);
  return mlp_forward(enc_spec, enc_w, y);
}

Matrix RatioModel::emulate(const Matrix& phi) const {
  emulator_rows_.fetch_add(phi.rows);
  return mlp_forward(emu_spec, emu_w, phi);
}

}  // namespace ee
