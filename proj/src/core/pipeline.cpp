#include "core/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "core/checkpoint.hpp"
#include "core/errors.hpp"
#include "core/io_util.hpp"
#include "core/posterior.hpp"
#include "core/rng.hpp"

namespace ee {

namespace {

constexpr std::uint64_t kRecordStream = 0x5245434f;     // "RECO"
constexpr std::uint64_t kInferStream = 0x494e4652;      // "INFR"
constexpr std::uint64_t kNestStream = 0x4e455354;       // "NEST"
constexpr std::uint64_t kEvalL1Stream = 0x4c314456;     // "L1DV"
constexpr std::uint64_t kEvalPostStream = 0x504f5354;   // "POST"
constexpr std::uint64_t kEvalRefStream = 0x52454643;    // "REFC"
constexpr std::uint64_t kEvalPriorStream = 0x50524952;  // "PRIR"
constexpr int kNestProbes = 4096;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void echo_comments(std::ostream& os, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) os << "# " << line << '\n';
}

std::string build_manifest(const RunConfig& cfg, std::uint64_t count) {
  std::ostringstream os;
  os << "count=" << count << '\n'
     << "seed=" << cfg.seed << '\n'
     << "param_dim=" << cfg.param_dim() << '\n'
     << "obs_dim=" << cfg.obs_dim() << '\n'
     << describe_process(cfg);
  return os.str();
}

Dataset load_checked(const RunConfig& cfg, const std::string& path, const std::string& role) {
  std::string manifest;
  Dataset ds = load_dataset(path, &manifest);
  if (manifest.empty())
    throw ConfigError(role + " dataset '" + path +
                      "' has no manifest, so its generating process cannot be verified");
  if (manifest.find(describe_process(cfg)) == std::string::npos)
    throw ConfigError(role + " dataset '" + path +
                      "' was generated by a different process than the config describes");
  if (ds.param_dim != cfg.param_dim() || ds.obs_dim != cfg.obs_dim())
    throw ConfigError(role + " dataset '" + path + "' dimensions (" +
                      std::to_string(ds.param_dim) + ", " + std::to_string(ds.obs_dim) +
                      ") do not match the configured simulator");
  return ds;
}

void check_model_dims(const RunConfig& cfg, const RatioModel& model) {
  if (model.enc_spec.input_dim != cfg.obs_dim() || model.emu_spec.input_dim != cfg.param_dim())
    throw ConfigError("checkpoint input dimensions do not match the configured simulator");
}

Matrix obs_matrix(const Dataset& ds) {
  Matrix m(static_cast<std::size_t>(ds.count()), ds.obs_dim);
  m.data = ds.obs;
  return m;
}

Matrix param_matrix(const Dataset& ds) {
  Matrix m(static_cast<std::size_t>(ds.count()), ds.param_dim);
  m.data = ds.params;
  return m;
}

std::vector<double> normalized(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0) || !std::isfinite(total))
    throw DomainError("weight list does not normalize to a distribution");
  for (double& x : w) x /= total;
  return w;
}

MetricReport eval_l1(const RunConfig& cfg, const RatioModel& model, const Dataset& ds) {
  if (cfg.kind != SimKind::synthetic)
    throw UsageError("the l1 metric needs the synthetic simulator's closed-form posterior");
  const std::size_t pd = cfg.param_dim();
  const Matrix f = model.encode(obs_matrix(ds));

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(ds.count()));
  for (std::uint64_t i = 0; i < ds.count(); ++i) {
    // Both posteriors are discretized on one shared prior draw set, so the
    // distance reflects density disagreement rather than draw noise. The
    // prior density divides out of both sides, which also drops the learned
    // normalizer: the distance scores shape, the cv metric scores scale.
    Rng rng = Rng::stream(cfg.seed, kEvalL1Stream, i);
    Matrix draws(cfg.l1_prior_draws, pd);
    for (std::size_t k = 0; k < draws.rows; ++k) cfg.prior.sample(rng, draws.row(k));
    const Matrix g = model.emulate(draws);
    const SyntheticTruePosterior truth(cfg.synthetic, ds.obs_row(i));

    std::vector<double> w_est(draws.rows), w_true(draws.rows);
    for (std::size_t k = 0; k < draws.rows; ++k) {
      w_est[k] = std::exp(row_dot(f, i, g, k) / model.tau);
      w_true[k] = truth.density(draws.row(k)) / cfg.prior.density(draws.row(k));
    }
    values.push_back(l1_posterior_distance(normalized(std::move(w_est)),
                                           normalized(std::move(w_true))));
  }
  return MetricReport::from_values("l1", values, cfg.text);
}

void eval_r2(const RunConfig& cfg, const RatioModel& model, const Dataset& ds,
             std::vector<MetricReport>& reports) {
  if (cfg.kind != SimKind::synthetic)
    throw UsageError("the r2 metric needs the synthetic simulator's closed-form embeddings");
  const std::size_t n = static_cast<std::size_t>(ds.count());

  Matrix z_true(n, 2);
  for (std::size_t i = 0; i < n; ++i) cfg.synthetic.decode_inverse(ds.obs_row(i), z_true.row(i));
  const Matrix f = model.encode(obs_matrix(ds));
  reports.push_back(
      MetricReport::from_values("r2_encoder", {latent_recovery_r2(z_true, f)}, cfg.text));

  Matrix g_true(n, 2);
  for (std::size_t i = 0; i < n; ++i) cfg.synthetic.true_g(ds.param_row(i), g_true.row(i));
  const Matrix g = model.emulate(param_matrix(ds));
  reports.push_back(
      MetricReport::from_values("r2_emulator", {latent_recovery_r2(g_true, g)}, cfg.text));
}

void eval_mmd(const RunConfig& cfg, const RatioModel& model, const Dataset& ds,
              std::vector<MetricReport>& reports) {
  if (cfg.kind != SimKind::lorenz)
    throw UsageError("the mmd metric compares samples against the lorenz reference circle");
  const std::size_t pd = cfg.param_dim();
  const std::size_t sigmas = cfg.mmd_sigmas.size();
  std::vector<std::vector<double>> post_vals(sigmas), prior_vals(sigmas);

  for (std::uint64_t i = 0; i < ds.count(); ++i) {
    const std::vector<double> y(ds.obs_row(i), ds.obs_row(i) + ds.obs_dim);
    PosteriorEstimate est(model, y, cfg.prior, cfg.normalizer_draws, cfg.seed);
    const SampleResult post =
        sample_posterior(est, cfg.mmd_sample_count,
                         Rng::stream(cfg.seed, kEvalPostStream, i).next_u64(),
                         cfg.envelope_inflation * est.max_draw_ratio());

    const std::vector<double> center(ds.param_row(i), ds.param_row(i) + pd);
    const Matrix reference = reference_circle_samples(
        center, cfg.prior, cfg.mmd_sample_count, Rng::stream(cfg.seed, kEvalRefStream, i).next_u64());

    Matrix prior_draws(cfg.mmd_sample_count, pd);
    Rng prior_rng = Rng::stream(cfg.seed, kEvalPriorStream, i);
    for (std::size_t k = 0; k < prior_draws.rows; ++k) cfg.prior.sample(prior_rng, prior_draws.row(k));

    for (std::size_t s = 0; s < sigmas; ++s) {
      post_vals[s].push_back(mmd_squared(post.samples, reference, cfg.mmd_sigmas[s]));
      prior_vals[s].push_back(mmd_squared(prior_draws, reference, cfg.mmd_sigmas[s]));
    }
  }

  for (std::size_t s = 0; s < sigmas; ++s) {
    std::ostringstream tag;
    tag << cfg.mmd_sigmas[s];
    reports.push_back(MetricReport::from_values("mmd_sigma_" + tag.str(), post_vals[s], cfg.text));
    reports.push_back(
        MetricReport::from_values("mmd_prior_sigma_" + tag.str(), prior_vals[s], cfg.text));
  }
}

MetricReport eval_cv(const RunConfig& cfg, const RatioModel& model, const Dataset& ds) {
  const double cv =
      normalizer_cv(model, obs_matrix(ds), cfg.prior, cfg.normalizer_draws, cfg.seed);
  return MetricReport::from_values("cv", {cv}, cfg.text);
}

MetricReport eval_redundancy(const RunConfig& cfg, const RatioModel& model) {
  if (cfg.kind != SimKind::synthetic || !cfg.synthetic.redundant)
    throw UsageError(
        "the redundancy metric needs the synthetic simulator with the redundant coordinate");
  if (cfg.redundancy_sweep_points < 2)
    throw ConfigError("the redundancy sweep needs at least two values");

  Matrix grid(cfg.redundancy_grid_points, 2);
  for (std::size_t j = 0; j < grid.rows; ++j) {
    const double t = cfg.prior.angle_lo + (cfg.prior.angle_hi - cfg.prior.angle_lo) *
                                              static_cast<double>(j) / static_cast<double>(grid.rows);
    cfg.prior.circle_point(t, grid.row(j));
  }
  std::vector<double> sweep(cfg.redundancy_sweep_points);
  for (std::size_t k = 0; k < sweep.size(); ++k)
    sweep[k] = static_cast<double>(k) / static_cast<double>(sweep.size() - 1);

  const double value = redundancy_sensitivity(model, grid, sweep);
  return MetricReport::from_values("redundancy", {value}, cfg.text);
}

}  // namespace

SimulateOutcome run_simulate(const RunConfig& cfg, std::uint64_t count,
                             const std::string& out_path) {
  if (count == 0) throw UsageError("simulate needs a positive record count");
  cfg.prior.validate();
  if (cfg.kind == SimKind::lorenz) cfg.lorenz.validate();

  const std::size_t pd = cfg.param_dim();
  const std::size_t od = cfg.obs_dim();
  Dataset ds;
  ds.param_dim = static_cast<std::uint32_t>(pd);
  ds.obs_dim = static_cast<std::uint32_t>(od);
  ds.params.resize(count * pd);
  ds.obs.resize(count * od);
  ds.seeds.resize(count);

  std::atomic<std::uint64_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;

  auto worker = [&]() {
    try {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= count) return;
        // Each record owns a stream keyed by its index, so thread count and
        // scheduling cannot change the dataset.
        Rng rng = Rng::stream(cfg.seed, kRecordStream, i);
        double* phi = ds.params.data() + i * pd;
        cfg.prior.sample(rng, phi);
        const std::uint64_t record_seed = rng.next_u64();
        ds.seeds[i] = record_seed;
        double* y = ds.obs.data() + i * od;
        if (cfg.kind == SimKind::synthetic) {
          Rng gen(record_seed);
          double z[2];
          cfg.synthetic.generate(phi, gen, y, z);
        } else {
          const std::vector<double> row = lorenz_generate(cfg.lorenz, phi, record_seed);
          std::copy(row.begin(), row.end(), y);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };

  if (cfg.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(cfg.threads);
    for (std::uint32_t t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  save_dataset(ds, out_path, build_manifest(cfg, count));

  SimulateOutcome out;
  out.count = count;
  out.param_dim = pd;
  out.obs_dim = od;
  out.dataset_path = out_path;
  return out;
}

TrainOutcome run_train(const RunConfig& cfg, const std::string& data_path,
                       const std::string& val_path, const std::string& ckpt_path) {
  const Dataset train_ds = load_checked(cfg, data_path, "training");
  const Dataset val_ds = load_checked(cfg, val_path, "validation");

  TrainConfig t = cfg.training;
  t.note = cfg.text;
  t.log_preamble = cfg.text;
  t.log_path = ckpt_path + ".log.csv";

  AugmentFn augment;
  if (t.intra_weight > 0.0) {
    if (cfg.kind != SimKind::lorenz)
      throw ConfigError("intra-domain augmentation is only defined for the lorenz simulator");
    const Lorenz96Model m = cfg.lorenz;
    // Under crop augmentation every epoch re-crops the same trajectory, so
    // cache each record's trajectory after the first view instead of
    // re-integrating it every epoch.
    auto cache = m.augment == Lorenz96Model::Augment::crop
                     ? std::make_shared<std::vector<std::unique_ptr<Matrix>>>(
                           static_cast<std::size_t>(train_ds.count()))
                     : nullptr;
    augment = [m, cache](const Dataset& ds, std::uint64_t row, std::uint64_t epoch) {
      const double* phi = ds.param_row(row);
      const Matrix* traj = nullptr;
      if (cache && row < cache->size()) {
        std::unique_ptr<Matrix>& slot = (*cache)[row];
        if (!slot)
          slot = std::make_unique<Matrix>(lorenz_trajectory(m, m.forcing(phi), ds.seeds[row]));
        traj = slot.get();
      }
      return lorenz_augment(m, phi, ds.seeds[row], epoch, traj);
    };
  }

  TrainOutcome out;
  out.result = train(train_ds, val_ds, cfg.prior, t, augment);
  save_checkpoint(out.result.model, ckpt_path);
  out.checkpoint_path = ckpt_path;
  out.log_path = t.log_path;
  return out;
}

InferOutcome run_infer(const RunConfig& cfg, const std::string& ckpt_path,
                       const std::string& obs_path, std::uint64_t index,
                       std::uint32_t sample_count, const std::string& out_path,
                       const std::string& prior_override_text) {
  if (sample_count == 0) throw UsageError("infer needs a positive sample count");
  const RatioModel model = load_checkpoint(ckpt_path);
  check_model_dims(cfg, model);
  const Dataset ds = load_checked(cfg, obs_path, "observation");
  if (index >= ds.count())
    throw UsageError("observation index " + std::to_string(index) +
                     " is out of range for a dataset of " + std::to_string(ds.count()) +
                     " records");
  const std::vector<double> y(ds.obs_row(index), ds.obs_row(index) + ds.obs_dim);

  PriorSpec prior = cfg.prior;
  if (!prior_override_text.empty()) {
    const RunConfig override_cfg = parse_run_config(prior_override_text);
    PriorSpec alt = override_cfg.prior;
    alt.validate();
    if (alt.dim() != prior.dim())
      throw ConfigError("override prior dimension differs from the training prior");
    // The ratio is only calibrated on the training prior's support, so the
    // override must nest inside it.
    Rng nest = Rng::stream(cfg.seed, kNestStream, 0);
    std::vector<double> probe(alt.dim());
    for (int k = 0; k < kNestProbes; ++k) {
      alt.sample(nest, probe.data());
      if (!prior.in_support(probe.data()))
        throw ConfigError("override prior support is not nested inside the training prior");
    }
    prior = alt;
  }

  const PosteriorEstimate est(model, y, prior, cfg.normalizer_draws, cfg.seed);
  const double envelope_b = cfg.envelope_inflation * est.max_draw_ratio();
  const std::uint64_t sample_seed = Rng::stream(cfg.seed, kInferStream, index).next_u64();
  const SampleResult res = sample_posterior(est, sample_count, sample_seed, envelope_b);

  std::ostringstream csv;
  echo_comments(csv, cfg.text);
  csv << "# observation_index=" << index << '\n'
      << "# normalizer=" << fmt(est.normalizer()) << '\n'
      << "# normalizer_draws=" << est.normalizer_draws() << '\n'
      << "# envelope_b=" << fmt(res.envelope_b) << '\n'
      << "# acceptance_rate=" << fmt(res.acceptance_rate) << '\n'
      << "# candidates=" << res.candidates << '\n'
      << "# envelope_violations=" << res.envelope_violations << '\n';
  csv << "sample_index";
  for (std::size_t d = 0; d < res.samples.cols; ++d) csv << ",phi_" << d;
  csv << ",candidate_ordinal\n";
  for (std::size_t i = 0; i < res.samples.rows; ++i) {
    csv << (i + 1);
    for (std::size_t d = 0; d < res.samples.cols; ++d) csv << ',' << fmt(res.samples(i, d));
    csv << ',' << res.candidate_ordinals[i] << '\n';
  }
  write_text_file(out_path, csv.str());

  InferOutcome out;
  out.samples = res.samples.rows;
  out.candidates = res.candidates;
  out.normalizer = est.normalizer();
  out.envelope_b = res.envelope_b;
  out.acceptance_rate = res.acceptance_rate;
  out.envelope_violations = res.envelope_violations;
  out.samples_path = out_path;
  return out;
}

std::string render_reports(const std::vector<MetricReport>& reports,
                           const std::string& config_echo) {
  std::ostringstream os;
  echo_comments(os, config_echo);
  for (const MetricReport& r : reports)
    os << "# summary " << r.name << " p25=" << fmt(r.p25) << " median=" << fmt(r.median)
       << " p75=" << fmt(r.p75) << '\n';
  os << "metric,instance,value\n";
  for (const MetricReport& r : reports)
    for (std::size_t i = 0; i < r.values.size(); ++i)
      os << r.name << ',' << (i + 1) << ',' << fmt(r.values[i]) << '\n';
  return os.str();
}

std::vector<MetricReport> run_eval(const RunConfig& cfg, const std::string& ckpt_path,
                                   const std::string& test_path,
                                   const std::vector<std::string>& metrics,
                                   const std::string& out_path) {
  if (metrics.empty()) throw UsageError("eval needs at least one metric");
  const RatioModel model = load_checkpoint(ckpt_path);
  check_model_dims(cfg, model);
  const Dataset ds = load_checked(cfg, test_path, "test");
  if (ds.count() == 0) throw ConfigError("test dataset '" + test_path + "' is empty");

  std::vector<MetricReport> reports;
  for (const std::string& name : metrics) {
    if (name == "l1")
      reports.push_back(eval_l1(cfg, model, ds));
    else if (name == "r2")
      eval_r2(cfg, model, ds, reports);
    else if (name == "mmd")
      eval_mmd(cfg, model, ds, reports);
    else if (name == "cv")
      reports.push_back(eval_cv(cfg, model, ds));
    else if (name == "redundancy")
      reports.push_back(eval_redundancy(cfg, model));
    else
      throw UsageError("unknown metric '" + name + "'");
  }

  if (!out_path.empty()) write_text_file(out_path, render_reports(reports, cfg.text));
  return reports;
}

}  // namespace ee
