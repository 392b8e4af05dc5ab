#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "eesbi/eesbi.h"

namespace {

int report_failure(ee_status st) {
  std::cerr << "error: " << ee_last_error() << '\n';
  return static_cast<int>(st);
}

// Options shared by every subcommand; the overrides are only forwarded when
// the flag was actually given.
struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  std::uint32_t threads = 0;
  std::string loss;
  double lambda = 0.0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* loss_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;

  void attach(CLI::App* cmd, bool with_training_overrides) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
    seed_opt = cmd->add_option("--seed", seed, "override run.seed");
    threads_opt = cmd->add_option("--threads", threads, "override run.threads");
    if (with_training_overrides) {
      loss_opt = cmd->add_option("--loss", loss, "override training loss: sym, phi_y or y_phi");
      lambda_opt = cmd->add_option("--lambda", lambda, "override the intra-domain loss weight");
    }
  }

  // Loads the config and applies the overrides; returns nonzero exit code on
  // failure, in which case *out stays null.
  int open(ee_config** out) const {
    ee_status st = ee_config_load(config_path.c_str(), out);
    if (st != EE_OK) return report_failure(st);
    if (seed_opt != nullptr && seed_opt->count() > 0 &&
        (st = ee_config_set_seed(*out, seed)) != EE_OK)
      return report_failure(st);
    if (threads_opt != nullptr && threads_opt->count() > 0 &&
        (st = ee_config_set_threads(*out, threads)) != EE_OK)
      return report_failure(st);
    if (loss_opt != nullptr && loss_opt->count() > 0 &&
        (st = ee_config_set_loss(*out, loss.c_str())) != EE_OK)
      return report_failure(st);
    if (lambda_opt != nullptr && lambda_opt->count() > 0 &&
        (st = ee_config_set_intra_weight(*out, lambda)) != EE_OK)
      return report_failure(st);
    return 0;
  }
};

struct ConfigGuard {
  ee_config* ptr = nullptr;
  ~ConfigGuard() { ee_config_free(ptr); }
};

int do_simulate(const CommonOpts& common, std::uint64_t count, const std::string& out_path) {
  ConfigGuard cfg;
  if (const int rc = common.open(&cfg.ptr); rc != 0) return rc;
  const ee_status st = ee_simulate(cfg.ptr, count, out_path.c_str());
  if (st != EE_OK) return report_failure(st);
  std::cout << "wrote " << count << " records (param_dim=" << ee_config_param_dim(cfg.ptr)
            << ", obs_dim=" << ee_config_obs_dim(cfg.ptr) << ") to " << out_path << '\n';
  return 0;
}

int do_train(const CommonOpts& common, const std::string& data_path, const std::string& val_path,
             const std::string& ckpt_path) {
  ConfigGuard cfg;
  if (const int rc = common.open(&cfg.ptr); rc != 0) return rc;
  ee_train_summary summary{};
  const ee_status st =
      ee_train(cfg.ptr, data_path.c_str(), val_path.c_str(), ckpt_path.c_str(), &summary);
  if (st != EE_OK) return report_failure(st);
  std::cout << "best epoch " << summary.best_epoch << " (validation score " << summary.best_score
            << ", final train loss " << summary.final_train_loss << ")\n"
            << "checkpoint: " << ckpt_path << "\n"
            << "epoch log:  " << ckpt_path << ".log.csv\n";
  return 0;
}

int do_infer(const CommonOpts& common, const std::string& ckpt_path, const std::string& obs_path,
             std::uint64_t index, std::uint32_t samples, const std::string& out_path,
             const std::string& override_path) {
  ConfigGuard cfg;
  if (const int rc = common.open(&cfg.ptr); rc != 0) return rc;
  std::string override_text;
  if (!override_path.empty()) {
    std::ifstream in(override_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read prior override '" << override_path << "'\n";
      return static_cast<int>(EE_RUNTIME);
    }
    std::ostringstream os;
    os << in.rdbuf();
    override_text = os.str();
  }
  ee_infer_summary summary{};
  const ee_status st =
      ee_infer(cfg.ptr, ckpt_path.c_str(), obs_path.c_str(), index, samples, out_path.c_str(),
               override_text.empty() ? nullptr : override_text.c_str(), &summary);
  if (st != EE_OK) return report_failure(st);
  std::cout << "accepted " << summary.samples << " of " << summary.candidates
            << " candidates (rate " << summary.acceptance_rate << ", envelope b "
            << summary.envelope_b << ", violations " << summary.envelope_violations << ")\n"
            << "normalizer " << summary.normalizer << "\n"
            << "samples: " << out_path << '\n';
  return 0;
}

int do_eval(const CommonOpts& common, const std::string& ckpt_path, const std::string& test_path,
            const std::string& metrics, const std::string& out_path) {
  ConfigGuard cfg;
  if (const int rc = common.open(&cfg.ptr); rc != 0) return rc;
  char* summary = nullptr;
  const ee_status st = ee_eval(cfg.ptr, ckpt_path.c_str(), test_path.c_str(), metrics.c_str(),
                               out_path.empty() ? nullptr : out_path.c_str(), &summary);
  if (st != EE_OK) return report_failure(st);
  std::cout << summary;
  ee_string_free(summary);
  if (!out_path.empty()) std::cout << "reports: " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint data/parameter embeddings on the hypersphere for likelihood-free inference"};
  app.require_subcommand(1);
  int rc = 0;

  CommonOpts sim_common;
  std::uint64_t sim_count = 0;
  std::string sim_out;
  CLI::App* sim = app.add_subcommand("simulate", "draw from the prior and run the simulator");
  sim_common.attach(sim, false);
  sim->add_option("--count", sim_count, "records to simulate")->required();
  sim->add_option("--out", sim_out, "output dataset path")->required();
  sim->callback([&] { rc = do_simulate(sim_common, sim_count, sim_out); });

  CommonOpts train_common;
  std::string train_data, train_val, train_ckpt;
  CLI::App* train = app.add_subcommand("train", "fit the encoder/emulator pair");
  train_common.attach(train, true);
  train->add_option("--data", train_data, "training dataset")->required();
  train->add_option("--val", train_val, "validation dataset")->required();
  train->add_option("--ckpt", train_ckpt, "checkpoint output path")->required();
  train->callback([&] { rc = do_train(train_common, train_data, train_val, train_ckpt); });

  CommonOpts infer_common;
  std::string infer_ckpt, infer_obs, infer_out, infer_override;
  std::uint64_t infer_index = 0;
  std::uint32_t infer_samples = 0;
  CLI::App* infer = app.add_subcommand("infer", "sample the posterior for one observation");
  infer_common.attach(infer, false);
  infer->add_option("--ckpt", infer_ckpt, "trained checkpoint")->required();
  infer->add_option("--obs", infer_obs, "dataset holding the observation")->required();
  infer->add_option("--index", infer_index, "observation index (default 0)");
  infer->add_option("--samples", infer_samples,
                    "posterior samples to draw (default: config sample count)");
  infer->add_option("--out", infer_out, "output CSV path")->required();
  infer->add_option("--prior-override", infer_override,
                    "config file whose prior restricts the sampling support");
  infer->callback([&] {
    rc = do_infer(infer_common, infer_ckpt, infer_obs, infer_index, infer_samples, infer_out,
                  infer_override);
  });

  CommonOpts eval_common;
  std::string eval_ckpt, eval_test, eval_metrics, eval_out;
  CLI::App* eval = app.add_subcommand("eval", "score a checkpoint on held-out data");
  eval_common.attach(eval, false);
  eval->add_option("--ckpt", eval_ckpt, "trained checkpoint")->required();
  eval->add_option("--test", eval_test, "held-out dataset")->required();
  eval->add_option("--metrics", eval_metrics, "comma-separated list: l1, r2, mmd, cv, redundancy")
      ->required();
  eval->add_option("--out", eval_out, "report CSV path");
  eval->callback([&] { rc = do_eval(eval_common, eval_ckpt, eval_test, eval_metrics, eval_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return static_cast<int>(EE_USAGE);
  }
  return rc;
}
