#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "core/errors.hpp"
#include "core/network.hpp"
#include "core/rng.hpp"
#include "core/tape.hpp"

namespace {

ee::NetworkSpec small_spec() {
  ee::NetworkSpec s;
  s.input_dim = 5;
  s.hidden_width = 16;
  s.block_count = 2;
  s.embedding_dim = 3;
  return s;
}

ee::Matrix random_batch(int rows, int cols, std::uint64_t seed) {
  ee::Matrix x(rows, cols);
  ee::Rng rng(seed);
  for (double& v : x.data) v = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("forward outputs live on the unit sphere") {
  const ee::NetworkSpec spec = small_spec();
  const ee::MlpWeights w = ee::init_weights(spec, 42);
  const ee::Matrix x = random_batch(7, spec.input_dim, 1);
  const ee::Matrix out = ee::mlp_forward(spec, w, x);
  REQUIRE(out.rows == 7);
  REQUIRE(out.cols == spec.embedding_dim);
  for (int i = 0; i < out.rows; ++i) {
    double n = 0.0;
    for (int j = 0; j < out.cols; ++j) n += out(i, j) * out(i, j);
    CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-12);
  }
}

TEST_CASE("tape forward is bitwise identical to the plain forward") {
  const ee::NetworkSpec spec = small_spec();
  const ee::MlpWeights w = ee::init_weights(spec, 43);
  const ee::Matrix x = random_batch(9, spec.input_dim, 2);
  const ee::Matrix plain = ee::mlp_forward(spec, w, x);

  ee::Tape tape;
  std::vector<ee::Tape::NodeId> weight_nodes;
  for (const ee::Matrix& t : w.tensors) weight_nodes.push_back(tape.input(t));
  const ee::Tape::NodeId out =
      ee::mlp_forward_tape(tape, spec, weight_nodes, tape.input(x));
  const ee::Matrix& taped = tape.value(out);
  REQUIRE(plain.rows == taped.rows);
  REQUIRE(plain.cols == taped.cols);
  CHECK(std::memcmp(plain.data.data(), taped.data.data(),
                    plain.data.size() * sizeof(double)) == 0);
  CHECK(weight_nodes.size() == spec.tensor_count());
}

TEST_CASE("rows are processed independently") {
  const ee::NetworkSpec spec = small_spec();
  const ee::MlpWeights w = ee::init_weights(spec, 44);
  const ee::Matrix x = random_batch(6, spec.input_dim, 3);
  const ee::Matrix batch = ee::mlp_forward(spec, w, x);
  for (int i = 0; i < x.rows; ++i) {
    ee::Matrix single(1, x.cols);
    for (int j = 0; j < x.cols; ++j) single(0, j) = x(i, j);
    const ee::Matrix one = ee::mlp_forward(spec, w, single);
    for (int j = 0; j < batch.cols; ++j) CHECK(one(0, j) == batch(i, j));
  }
}

TEST_CASE("weight init is seed-deterministic with zero biases") {
  const ee::NetworkSpec spec = small_spec();
  const ee::MlpWeights a = ee::init_weights(spec, 7);
  const ee::MlpWeights b = ee::init_weights(spec, 7);
  const ee::MlpWeights c = ee::init_weights(spec, 8);
  REQUIRE(a.tensors.size() == b.tensors.size());
  bool all_equal = true, any_diff = false;
  for (size_t i = 0; i < a.tensors.size(); ++i) {
    if (a.tensors[i].data != b.tensors[i].data) all_equal = false;
    if (a.tensors[i].data != c.tensors[i].data) any_diff = true;
  }
  CHECK(all_equal);
  CHECK(any_diff);

  // Odd slots are bias rows: zero at init, with symmetric weight ranges.
  for (size_t i = 1; i < a.tensors.size(); i += 2) {
    CHECK(a.tensors[i].rows == 1);
    for (double v : a.tensors[i].data) CHECK(v == 0.0);
  }
  const double bound = std::sqrt(6.0 / spec.input_dim);
  for (double v : a.tensors[0].data) {
    CHECK(v >= -bound);
    CHECK(v <= bound);
  }
}

TEST_CASE("ratio model counts rows pushed through each head") {
  ee::RatioModel m;
  m.enc_spec = small_spec();
  m.emu_spec = small_spec();
  m.emu_spec.input_dim = 2;
  m.tau = 0.5;
  m.enc_w = ee::init_weights(m.enc_spec, 1);
  m.emu_w = ee::init_weights(m.emu_spec, 2);

  CHECK(m.encoder_rows() == 0);
  CHECK(m.emulator_rows() == 0);
  (void)m.encode(random_batch(4, m.enc_spec.input_dim, 9));
  (void)m.emulate(random_batch(11, 2, 10));
  (void)m.encode(random_batch(1, m.enc_spec.input_dim, 11));
  CHECK(m.encoder_rows() == 5);
  CHECK(m.emulator_rows() == 11);

  ee::RatioModel copy = m;
  CHECK(copy.encoder_rows() == 5);
  (void)copy.encode(random_batch(2, m.enc_spec.input_dim, 12));
  CHECK(copy.encoder_rows() == 7);
  CHECK(m.encoder_rows() == 5);  // counters are per-instance
}

TEST_CASE("spec validation rejects degenerate shapes") {
  ee::NetworkSpec s = small_spec();
  s.input_dim = 0;
  CHECK_THROWS_AS(s.validate(), ee::ConfigError);
  s = small_spec();
  s.embedding_dim = 1;
  CHECK_THROWS_AS(s.validate(), ee::ConfigError);
  s = small_spec();
  s.activation_slope = 1.5;
  CHECK_THROWS_AS(s.validate(), ee::ConfigError);
  s = small_spec();
  s.hidden_width = 0;
  CHECK_THROWS_AS(s.validate(), ee::ConfigError);
}

TEST_CASE("block count controls the tensor count") {
  ee::NetworkSpec s = small_spec();
  s.block_count = 0;
  CHECK(s.tensor_count() == 4);
  s.block_count = 3;
  CHECK(s.tensor_count() == 16);
  const ee::MlpWeights w = ee::init_weights(s, 5);
  CHECK(w.tensors.size() == 16);
}

TEST_CASE("forward rejects input with the wrong width") {
  const ee::NetworkSpec spec = small_spec();
  const ee::MlpWeights w = ee::init_weights(spec, 42);
  const ee::Matrix bad = random_batch(3, spec.input_dim + 1, 1);
  CHECK_THROWS_AS(ee::mlp_forward(spec, w, bad), ee::DomainError);
}
