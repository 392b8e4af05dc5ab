#include "core/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"
#include "core/losses.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "core/tape.hpp"

namespace ee {

namespace {

constexpr std::uint64_t kEncInitStream = 0x454e43;   // "ENC"
constexpr std::uint64_t kEmuInitStream = 0x454d55;   // "EMU"
constexpr std::uint64_t kShuffleStream = 0x53485546; // "SHUF"
constexpr std::uint64_t kValDrawStream = 0x56414c44; // "VALD"

constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

Matrix gather_rows(const std::vector<double>& flat, std::size_t width,
                   const std::vector<std::uint64_t>& rows) {
  Matrix out(static_cast<int>(rows.size()), static_cast<int>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(rows[i] * width),
              flat.begin() + static_cast<std::ptrdiff_t>((rows[i] + 1) * width),
              out.data.begin() + static_cast<std::ptrdiff_t>(i * width));
  return out;
}

}  // namespace

double lr_schedule(std::uint64_t step, std::uint64_t total_steps, double initial_lr) {
  if (total_steps == 0) return initial_lr;
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return initial_lr * 0.5 * (1.0 + std::cos(M_PI * frac));
}

void adamw_step(const std::vector<Matrix*>& weights, const std::vector<const Matrix*>& grads,
                AdamWState& state, double lr, double weight_decay) {
  if (weights.size() != grads.size()) throw DomainError("optimizer weight/grad count mismatch");
  if (state.m.empty()) {
    for (const Matrix* w : weights) {
      state.m.emplace_back(w->rows, w->cols);
      state.v.emplace_back(w->rows, w->cols);
    }
  }
  if (state.m.size() != weights.size()) throw DomainError("optimizer state size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < weights.size(); ++k) {
    Matrix& w = *weights[k];
    const Matrix& g = *grads[k];
    if (!w.same_shape(g) || !w.same_shape(state.m[k]))
      throw DomainError("optimizer tensor shape mismatch");
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      double& m = state.m[k].data[i];
      double& v = state.v[k].data[i];
      m = kBeta1 * m + (1.0 - kBeta1) * g.data[i];
      v = kBeta2 * v + (1.0 - kBeta2) * g.data[i] * g.data[i];
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      w.data[i] -= lr * (m_hat / (std::sqrt(v_hat) + kEps) + weight_decay * w.data[i]);
    }
  }
}

void TrainConfig::validate() const {
  enc_spec.validate();
  emu_spec.validate();
  if (enc_spec.embedding_dim != emu_spec.embedding_dim)
    throw ConfigError("encoder and emulator must share the embedding dimension");
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive");
  if (intra_weight < 0.0) throw ConfigError("intra weight must be nonnegative");
  if (epochs < 1) throw ConfigError("training needs at least one epoch");
  if (batch_size < 2) throw ConfigError("inter-domain losses need batch size of at least 2");
  if (learning_rate < 0.0) throw ConfigError("learning rate must be nonnegative");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be nonnegative");
  if (val_interval < 1) throw ConfigError("validation interval must be at least 1");
  if (val_normalizer_draws < 1) throw ConfigError("validation needs at least one normalizer draw");
}

std::vector<double> validation_densities(const RatioModel& model, const Dataset& val,
                                         const PriorSpec& prior, const Matrix& normalizer_params) {
  if (val.count() == 0) throw DomainError("validation set is empty");
  Matrix obs(static_cast<int>(val.count()), static_cast<int>(val.obs_dim));
  obs.data = val.obs;
  Matrix params(static_cast<int>(val.count()), static_cast<int>(val.param_dim));
  params.data = val.params;

  const Matrix f = model.encode(obs);
  const Matrix g_val = model.emulate(params);
  const Matrix g_norm = model.emulate(normalizer_params);

  std::vector<double> out(val.count());
  for (std::size_t i = 0; i < f.rows; ++i) {
    double c = 0.0;
    for (std::size_t k = 0; k < g_norm.rows; ++k) c += std::exp(row_dot(f, i, g_norm, k) / model.tau);
    const double s = row_dot(f, i, g_val, i) / model.tau;
    out[static_cast<std::size_t>(i)] =
        g_norm.rows / c * std::exp(s) * prior.density(val.param_row(i));
  }
  return out;
}

double validation_score(const RatioModel& model, const Dataset& val, const PriorSpec& prior,
                        const Matrix& normalizer_params) {
  const std::vector<double> d = validation_densities(model, val, prior, normalizer_params);
  return std::accumulate(d.begin(), d.end(), 0.0);
}

TrainResult train(const Dataset& train_ds, const Dataset& val_ds, const PriorSpec& prior,
                  const TrainConfig& cfg, const AugmentFn& augment) {
  cfg.validate();
  prior.validate();
  if (train_ds.count() == 0) throw ConfigError("training dataset is empty");
  if (val_ds.count() == 0) throw ConfigError("validation dataset is empty");
  if (train_ds.obs_dim != cfg.enc_spec.input_dim)
    throw ConfigError("dataset observation dim disagrees with the encoder input");
  if (train_ds.param_dim != cfg.emu_spec.input_dim)
    throw ConfigError("dataset parameter dim disagrees with the emulator input");
  if (val_ds.obs_dim != train_ds.obs_dim || val_ds.param_dim != train_ds.param_dim)
    throw ConfigError("validation dataset dims disagree with the training dataset");
  if (prior.dim() != train_ds.param_dim)
    throw ConfigError("prior dimension disagrees with the dataset");
  if (cfg.intra_weight > 0.0 && !augment)
    throw ConfigError("intra loss requires an augmentation source");

  const std::uint64_t n = train_ds.count();
  const std::uint32_t batch = static_cast<std::uint32_t>(
      std::min<std::uint64_t>(cfg.batch_size, n));
  if (batch < 2) throw ConfigError("need at least two training records per batch");
  const std::uint64_t batches_per_epoch = n / batch;
  const std::uint64_t total_steps = batches_per_epoch * cfg.epochs;

  MlpWeights enc = init_weights(cfg.enc_spec, Rng::stream(cfg.seed, kEncInitStream, 0).next_u64());
  MlpWeights emu = init_weights(cfg.emu_spec, Rng::stream(cfg.seed, kEmuInitStream, 0).next_u64());

  Matrix normalizer_params(static_cast<int>(cfg.val_normalizer_draws),
                           static_cast<int>(prior.dim()));
  {
    Rng rng(Rng::stream(cfg.seed, kValDrawStream, 0));
    for (std::uint32_t i = 0; i < cfg.val_normalizer_draws; ++i)
      prior.sample(rng, normalizer_params.data.data() + static_cast<std::size_t>(i) * prior.dim());
  }

  std::ofstream log;
  if (!cfg.log_path.empty()) {
    log.open(cfg.log_path, std::ios::trunc);
    if (!log) throw RuntimeError("cannot open training log for writing: " + cfg.log_path);
    if (!cfg.log_preamble.empty()) {
      std::istringstream pre(cfg.log_preamble);
      std::string pline;
      while (std::getline(pre, pline)) log << "# " << pline << '\n';
    }
    log << "epoch,train_loss,val_score,lr,wall_seconds\n";
  }

  auto make_model = [&](const MlpWeights& e, const MlpWeights& u) {
    RatioModel m;
    m.enc_spec = cfg.enc_spec;
    m.emu_spec = cfg.emu_spec;
    m.enc_w = e;
    m.emu_w = u;
    m.tau = cfg.tau;
    m.meta.loss_mode = cfg.loss_mode;
    m.meta.intra_weight = cfg.intra_weight;
    m.meta.bank_capacity = cfg.bank_capacity;
    m.meta.epochs = cfg.epochs;
    m.meta.seed = cfg.seed;
    m.meta.note = cfg.note;
    return m;
  };

  AdamWState opt;
  MemoryBank bank(cfg.bank_capacity, static_cast<int>(cfg.emu_spec.embedding_dim));
  TrainResult result;
  bool have_best = false;
  MlpWeights best_enc, best_emu;
  std::vector<std::uint64_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t step = 0;
  for (std::uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(Rng::stream(cfg.seed, kShuffleStream, epoch));
    for (std::uint64_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.below(i + 1)]);

    double loss_sum = 0.0;
    double lr_now = cfg.learning_rate;
    for (std::uint64_t b = 0; b < batches_per_epoch; ++b) {
      std::vector<std::uint64_t> rows(order.begin() + static_cast<std::ptrdiff_t>(b * batch),
                                      order.begin() + static_cast<std::ptrdiff_t>((b + 1) * batch));
      Matrix x_obs = gather_rows(train_ds.obs, train_ds.obs_dim, rows);
      Matrix x_phi = gather_rows(train_ds.params, train_ds.param_dim, rows);

      Tape tape;
      std::vector<Tape::NodeId> enc_nodes, emu_nodes;
      for (const Matrix& t : enc.tensors) enc_nodes.push_back(tape.input(t));
      for (const Matrix& t : emu.tensors) emu_nodes.push_back(tape.input(t));
      const Tape::NodeId f = mlp_forward_tape(tape, cfg.enc_spec, enc_nodes, tape.input(x_obs));
      const Tape::NodeId g = mlp_forward_tape(tape, cfg.emu_spec, emu_nodes, tape.input(x_phi));
      Tape::NodeId f_aug = -1;
      if (cfg.intra_weight > 0.0) {
        Matrix x_aug(x_obs.rows, x_obs.cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const std::vector<double> view = augment(train_ds, rows[i], epoch);
          if (view.size() != train_ds.obs_dim)
            throw RuntimeError("augmentation returned the wrong observation width");
          std::copy(view.begin(), view.end(),
                    x_aug.data.begin() + static_cast<std::ptrdiff_t>(i * train_ds.obs_dim));
        }
        f_aug = mlp_forward_tape(tape, cfg.enc_spec, enc_nodes, tape.input(x_aug));
      }

      const Matrix bank_snapshot = bank.snapshot();
      const Tape::NodeId loss = loss_objective_node(
          tape, cfg.loss_mode, f, g, cfg.tau,
          bank_snapshot.rows > 0 ? &bank_snapshot : nullptr, f_aug, cfg.intra_weight);
      const double loss_value = tape.scalar_value(loss);
      if (!std::isfinite(loss_value)) {
        std::ostringstream msg;
        msg << "training loss became non-finite at epoch " << epoch << ", batch " << b + 1;
        throw RuntimeError(msg.str());
      }
      tape.backward(loss);

      std::vector<Matrix*> weights;
      std::vector<const Matrix*> grads;
      for (std::size_t k = 0; k < enc.tensors.size(); ++k) {
        weights.push_back(&enc.tensors[k]);
        grads.push_back(&tape.grad(enc_nodes[k]));
      }
      for (std::size_t k = 0; k < emu.tensors.size(); ++k) {
        weights.push_back(&emu.tensors[k]);
        grads.push_back(&tape.grad(emu_nodes[k]));
      }
      lr_now = lr_schedule(step, total_steps, cfg.learning_rate);
      adamw_step(weights, grads, opt, lr_now, cfg.weight_decay);
      bank.push(tape.value(g));  // pre-update embeddings, detached by copy
      loss_sum += loss_value;
      ++step;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(batches_per_epoch);
    rec.lr = lr_now;
    rec.val_score = std::numeric_limits<double>::quiet_NaN();
    if (epoch % cfg.val_interval == 0 || epoch == cfg.epochs) {
      const RatioModel current = make_model(enc, emu);
      const std::vector<double> densities =
          validation_densities(current, val_ds, prior, normalizer_params);
      rec.val_score = percentile_linear(densities, 50.0);
      if (!have_best || rec.val_score >= result.best_score) {
        have_best = true;
        best_enc = enc;
        best_emu = emu;
        result.best_epoch = epoch;
        result.best_score = rec.val_score;
      }
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);
    if (log.is_open()) {
      log << std::setprecision(17) << rec.epoch << ',' << rec.train_loss << ',';
      if (std::isnan(rec.val_score))
        log << "nan";
      else
        log << rec.val_score;
      log << ',' << rec.lr << ',' << rec.wall_seconds << '\n';
      log.flush();
    }
  }

  result.model = make_model(best_enc, best_emu);
  return result;
}

}  // namespace ee
