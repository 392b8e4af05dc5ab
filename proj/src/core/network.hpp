#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/tape.hpp"

namespace ee {

// Residual MLP head: input linear layer, block_count residual blocks of
// (linear -> leaky-relu -> linear) + skip at a shared hidden width, output
// linear layer, final row-normalize onto S^{embedding_dim - 1}.
struct NetworkSpec {
  std::uint32_t input_dim = 0;
  std::uint32_t hidden_width = 0;
  std::uint32_t block_count = 0;
  std::uint32_t embedding_dim = 0;
  double activation_slope = 0.2;

  std::size_t tensor_count() const { return 4 + 4 * static_cast<std::size_t>(block_count); }
  void validate() const;
  bool operator==(const NetworkSpec&) const = default;
};

struct MlpWeights {
  // Declared order: W_in, b_in, (W1, b1, W2, b2) per block, W_out, b_out.
  std::vector<Matrix> tensors;
};

// He-style uniform fan-in init (bound sqrt(6 / fan_in)), zero biases.
MlpWeights init_weights(const NetworkSpec& spec, std::uint64_t seed);

Matrix mlp_forward(const NetworkSpec& spec, const MlpWeights& w, const Matrix& x);

// Same computation recorded on a tape; weight_nodes follow the declared
// tensor order. Shares the eager kernels, so values match mlp_forward
// bit-for-bit.
Tape::NodeId mlp_forward_tape(Tape& tape, const NetworkSpec& spec,
                              const std::vector<Tape::NodeId>& weight_nodes, Tape::NodeId x);

enum class LossMode : std::uint32_t { sym = 0, phi_y = 1, y_phi = 2 };

struct TrainMeta {
  LossMode loss_mode = LossMode::sym;
  double intra_weight = 0.0;
  std::uint32_t bank_capacity = 0;
  std::uint32_t epochs = 0;
  std::uint64_t seed = 0;
  std::string note;
};

// Trained pair of heads plus the temperature. Immutable after training;
// the row counters instrument how many inputs each head has embedded (used
// by the inference-economy checks).
struct RatioModel {
  NetworkSpec enc_spec, emu_spec;
  MlpWeights enc_w, emu_w;
  double tau = 1.0;
  TrainMeta meta;

  RatioModel() = default;
  RatioModel(const RatioModel& o);
  RatioModel& operator=(const RatioModel& o);

  Matrix encode(const Matrix& y) const;    // y: batch x enc input dim
  Matrix emulate(const Matrix& phi) const;  // phi: batch x emu input dim

  std::uint64_t encoder_rows() const { return encoder_rows_.load(); }
  std::uint64_t emulator_rows() const { return emulator_rows_.load(); }

private:
  mutable std::atomic<std::uint64_t> encoder_rows_{0};
  mutable std::atomic<std::uint64_t> emulator_rows_{0};
};

}  // namespace ee
