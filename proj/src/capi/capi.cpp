#include "eesbi/eesbi.h"

#include <cstring>
#include <exception>
#include <sstream>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/io_util.hpp"
#include "core/pipeline.hpp"

struct ee_config {
  ee::RunConfig cfg;
};

namespace {

thread_local std::string t_error;

template <typename Fn>
ee_status guarded(Fn&& fn) noexcept {
  try {
    t_error.clear();
    fn();
    return EE_OK;
  } catch (const ee::Error& e) {
    t_error = e.what();
    return static_cast<ee_status>(static_cast<int>(e.status()));
  } catch (const std::exception& e) {
    t_error = e.what();
    return EE_RUNTIME;
  } catch (...) {
    t_error = "unidentified failure";
    return EE_RUNTIME;
  }
}

void require_arg(const void* p, const char* what) {
  if (p == nullptr) throw ee::UsageError(std::string(what) + " must not be null");
}

// Records a flag-level override in the echoed config text without disturbing
// how that text parses.
void note_override(ee::RunConfig& cfg, const std::string& line) {
  if (!cfg.text.empty() && cfg.text.back() != '\n') cfg.text += '\n';
  cfg.text += "# cli-override " + line + "\n";
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::size_t a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const std::size_t b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

}  // namespace

extern "C" {

const char* ee_last_error(void) { return t_error.c_str(); }

const char* ee_version(void) { return "0.1.0"; }

ee_status ee_config_parse(const char* text, ee_config** out) {
  return guarded([&] {
    require_arg(text, "config text");
    require_arg(out, "config output handle");
    *out = new ee_config{ee::parse_run_config(text)};
  });
}

ee_status ee_config_load(const char* path, ee_config** out) {
  return guarded([&] {
    require_arg(path, "config path");
    require_arg(out, "config output handle");
    *out = new ee_config{ee::load_run_config(path)};
  });
}

void ee_config_free(ee_config* cfg) { delete cfg; }

ee_status ee_config_set_seed(ee_config* cfg, uint64_t seed) {
  return guarded([&] {
    require_arg(cfg, "config handle");
    cfg->cfg.seed = seed;
    cfg->cfg.training.seed = seed;
    note_override(cfg->cfg, "run.seed = " + std::to_string(seed));
  });
}

ee_status ee_config_set_threads(ee_config* cfg, uint32_t threads) {
  return guarded([&] {
    require_arg(cfg, "config handle");
    if (threads == 0) throw ee::UsageError("thread count must be positive");
    cfg->cfg.threads = threads;
    note_override(cfg->cfg, "run.threads = " + std::to_string(threads));
  });
}

ee_status ee_config_set_loss(ee_config* cfg, const char* loss) {
  return guarded([&] {
    require_arg(cfg, "config handle");
    require_arg(loss, "loss name");
    const std::string v = loss;
    if (v == "sym")
      cfg->cfg.training.loss_mode = ee::LossMode::sym;
    else if (v == "phi_y")
      cfg->cfg.training.loss_mode = ee::LossMode::phi_y;
    else if (v == "y_phi")
      cfg->cfg.training.loss_mode = ee::LossMode::y_phi;
    else
      throw ee::UsageError("loss must be sym, phi_y or y_phi, got '" + v + "'");
    note_override(cfg->cfg, "training.loss = " + v);
  });
}

ee_status ee_config_set_intra_weight(ee_config* cfg, double weight) {
  return guarded([&] {
    require_arg(cfg, "config handle");
    if (!(weight >= 0.0)) throw ee::UsageError("intra-domain weight must be nonnegative");
    cfg->cfg.training.intra_weight = weight;
    std::ostringstream os;
    os << "training.lambda_intra = " << weight;
    note_override(cfg->cfg, os.str());
  });
}

uint64_t ee_config_param_dim(const ee_config* cfg) {
  return cfg == nullptr ? 0 : cfg->cfg.param_dim();
}

uint64_t ee_config_obs_dim(const ee_config* cfg) {
  return cfg == nullptr ? 0 : cfg->cfg.obs_dim();
}

uint32_t ee_config_sample_count(const ee_config* cfg) {
  return cfg == nullptr ? 0 : cfg->cfg.sample_count;
}

ee_status ee_simulate(const ee_config* cfg, uint64_t count, const char* out_path) {
  return guarded([&] {
    require_arg(cfg, "config handle");
    require_arg(out_path, "output path");
    ee::run_simulate(cfg->cfg, count, out_path);
  });
}

ee_status ee_train(const ee_config* cfg, const char* data_path, const char* val_path,
                   const char* ckpt_path, ee_train_summary* summary) {
  return guarded([&] {
    require_arg(cfg, "config handle");
    require_arg(data_path, "training dataset path");
    require_arg(val_path, "validation dataset path");
    require_arg(ckpt_path, "checkpoint path");
    const ee::TrainOutcome out = ee::run_train(cfg->cfg, data_path, val_path, ckpt_path);
    if (summary != nullptr) {
      summary->best_epoch = out.result.best_epoch;
      summary->best_score = out.result.best_score;
      summary->final_train_loss =
          out.result.history.empty() ? 0.0 : out.result.history.back().train_loss;
    }
  });
}

ee_status ee_infer(const ee_config* cfg, const char* ckpt_path, const char* obs_path,
                   uint64_t index, uint32_t sample_count, const char* out_path,
                   const char* prior_override_text, ee_infer_summary* summary) {
  return guarded([&] {
    require_arg(cfg, "config handle");
    require_arg(ckpt_path, "checkpoint path");
    require_arg(obs_path, "observation dataset path");
    require_arg(out_path, "output path");
    const std::uint32_t count = sample_count == 0 ? cfg->cfg.sample_count : sample_count;
    const std::string override_text =
        prior_override_text == nullptr ? std::string() : std::string(prior_override_text);
    const ee::InferOutcome out =
        ee::run_infer(cfg->cfg, ckpt_path, obs_path, index, count, out_path, override_text);
    if (summary != nullptr) {
      summary->samples = out.samples;
      summary->candidates = out.candidates;
      summary->normalizer = out.normalizer;
      summary->envelope_b = out.envelope_b;
      summary->acceptance_rate = out.acceptance_rate;
      summary->envelope_violations = out.envelope_violations;
    }
  });
}

ee_status ee_eval(const ee_config* cfg, const char* ckpt_path, const char* test_path,
                  const char* metrics, const char* out_path, char** summary_out) {
  return guarded([&] {
    require_arg(cfg, "config handle");
    require_arg(ckpt_path, "checkpoint path");
    require_arg(test_path, "test dataset path");
    require_arg(metrics, "metric list");
    const std::vector<ee::MetricReport> reports =
        ee::run_eval(cfg->cfg, ckpt_path, test_path, split_list(metrics),
                     out_path == nullptr ? std::string() : std::string(out_path));
    if (summary_out != nullptr) {
      std::ostringstream os;
      os.precision(6);
      for (const ee::MetricReport& r : reports)
        os << r.name << " p25=" << r.p25 << " median=" << r.median << " p75=" << r.p75 << '\n';
      const std::string text = os.str();
      char* buf = new char[text.size() + 1];
      std::memcpy(buf, text.c_str(), text.size() + 1);
      *summary_out = buf;
    }
  });
}

void ee_string_free(char* s) { delete[] s; }

}  // extern "C"
