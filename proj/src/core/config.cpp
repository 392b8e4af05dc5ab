#include "core/config.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace ee {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap split_sections(const std::string& text) {
  static const std::set<std::string> known = {"simulator", "prior",     "network",
                                              "training",  "inference", "run"};
  SectionMap out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("config line " + std::to_string(lineno) +
                                             ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!known.count(section))
        throw ConfigError("config line " + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      out[section];  // a section may legitimately be empty
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!out[section].emplace(key, value).second)
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                        "' in [" + section + "]");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    if (!std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as a nonnegative integer");
  }
}

std::uint32_t parse_u32(const std::string& key, const std::string& v) {
  const std::uint64_t x = parse_u64(key, v);
  if (x > 0xffffffffull)
    throw ConfigError("config key '" + key + "': value '" + v + "' is too large");
  return static_cast<std::uint32_t>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

// Pulls `key` out of the section map, so leftovers can be rejected at the end.
class KeyReader {
public:
  KeyReader(std::map<std::string, std::string>& kv, std::string section)
      : kv_(kv), section_(std::move(section)) {}

  bool take(const std::string& key, std::string& out) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return false;
    out = it->second;
    kv_.erase(it);
    return true;
  }

  void reject_leftovers() const {
    if (kv_.empty()) return;
    throw ConfigError("unknown key '" + kv_.begin()->first + "' in [" + section_ + "]");
  }

private:
  std::map<std::string, std::string>& kv_;
  std::string section_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

std::size_t RunConfig::obs_dim() const {
  return kind == SimKind::synthetic ? SyntheticModel::obs_dim()
                                    : static_cast<std::size_t>(lorenz.obs_dim());
}

std::size_t RunConfig::param_dim() const {
  return kind == SimKind::synthetic ? synthetic.param_dim()
                                    : static_cast<std::size_t>(Lorenz96Model::param_dim());
}

RunConfig parse_run_config(const std::string& text) {
  SectionMap sections = split_sections(text);
  RunConfig cfg;
  cfg.text = text;

  // The simulator kind steers defaults and the key tables everywhere else.
  {
    KeyReader sim(sections["simulator"], "simulator");
    std::string v;
    if (!sim.take("kind", v)) throw ConfigError("config needs simulator.kind");
    if (v == "synthetic")
      cfg.kind = SimKind::synthetic;
    else if (v == "lorenz")
      cfg.kind = SimKind::lorenz;
    else
      throw ConfigError("simulator.kind must be synthetic or lorenz, got '" + v + "'");

    if (cfg.kind == SimKind::synthetic) {
      double kappa = 2.0;
      double a[4] = {0.5, 0.2, 0.0, 0.8};
      std::uint64_t decoder_seed = 1;
      bool redundant = false;
      if (sim.take("kappa", v)) kappa = parse_double("kappa", v);
      if (sim.take("a_matrix", v)) {
        const std::vector<double> m = parse_double_list("a_matrix", v);
        if (m.size() != 4)
          throw ConfigError("a_matrix needs 4 comma-separated entries (row-major 2x2)");
        std::copy(m.begin(), m.end(), a);
      }
      if (sim.take("decoder_seed", v)) decoder_seed = parse_u64("decoder_seed", v);
      if (sim.take("redundant", v)) redundant = parse_bool("redundant", v);
      sim.reject_leftovers();
      cfg.synthetic = SyntheticModel::create(kappa, a, decoder_seed, redundant);
    } else {
      Lorenz96Model& m = cfg.lorenz;
      if (sim.take("slow_count", v)) m.slow_count = static_cast<int>(parse_u32("slow_count", v));
      if (sim.take("fast_per_slow", v))
        m.fast_per_slow = static_cast<int>(parse_u32("fast_per_slow", v));
      if (sim.take("coupling", v)) m.coupling_c = parse_double("coupling", v);
      if (sim.take("dt_time_units", v)) m.dt = parse_double("dt_time_units", v);
      if (sim.take("trajectory_steps", v))
        m.trajectory_steps = static_cast<int>(parse_u32("trajectory_steps", v));
      if (sim.take("crop_steps", v)) m.crop_steps = static_cast<int>(parse_u32("crop_steps", v));
      if (sim.take("augment", v)) {
        if (v == "crop")
          m.augment = Lorenz96Model::Augment::crop;
        else if (v == "fresh")
          m.augment = Lorenz96Model::Augment::fresh;
        else
          throw ConfigError("simulator.augment must be crop or fresh, got '" + v + "'");
      }
      sim.reject_leftovers();
      m.validate();
    }
  }

  {
    KeyReader pr(sections["prior"], "prior");
    std::string v;
    if (cfg.kind == SimKind::synthetic) {
      cfg.prior = cfg.synthetic.prior();
      if (pr.take("angle_lo_rad", v)) cfg.prior.angle_lo = parse_double("angle_lo_rad", v);
      if (pr.take("angle_hi_rad", v)) cfg.prior.angle_hi = parse_double("angle_hi_rad", v);
    } else {
      cfg.prior.kind = PriorKind::uniform_box;
      double lo = -15.0, hi = 15.0;
      if (pr.take("box_lo", v)) lo = parse_double("box_lo", v);
      if (pr.take("box_hi", v)) hi = parse_double("box_hi", v);
      cfg.prior.lo = {lo, lo};
      cfg.prior.hi = {hi, hi};
    }
    pr.reject_leftovers();
    cfg.prior.validate();
  }

  const bool syn = cfg.kind == SimKind::synthetic;
  {
    KeyReader net(sections["network"], "network");
    std::string v;
    NetworkSpec enc, emu;
    enc.input_dim = static_cast<std::uint32_t>(cfg.obs_dim());
    emu.input_dim = static_cast<std::uint32_t>(cfg.param_dim());
    enc.hidden_width = emu.hidden_width = syn ? 60 : 120;
    enc.block_count = emu.block_count = 2;
    enc.embedding_dim = emu.embedding_dim = syn ? 2 : 64;
    if (net.take("encoder_width", v)) enc.hidden_width = parse_u32("encoder_width", v);
    if (net.take("encoder_blocks", v)) enc.block_count = parse_u32("encoder_blocks", v);
    if (net.take("emulator_width", v)) emu.hidden_width = parse_u32("emulator_width", v);
    if (net.take("emulator_blocks", v)) emu.block_count = parse_u32("emulator_blocks", v);
    if (net.take("embedding_dim", v))
      enc.embedding_dim = emu.embedding_dim = parse_u32("embedding_dim", v);
    if (net.take("activation_slope", v))
      enc.activation_slope = emu.activation_slope = parse_double("activation_slope", v);
    net.reject_leftovers();
    enc.validate();
    emu.validate();
    cfg.training.enc_spec = enc;
    cfg.training.emu_spec = emu;
  }

  {
    KeyReader tr(sections["training"], "training");
    std::string v;
    TrainConfig& t = cfg.training;
    // Temperature matched to the generating concentration; kappa = 0 carries
    // no signal, so any finite default serves there.
    t.tau = syn ? (cfg.synthetic.kappa > 0.0 ? 1.0 / cfg.synthetic.kappa : 1.0) : 0.1;
    t.epochs = syn ? 2000 : 500;
    t.batch_size = 128;
    t.learning_rate = 1e-3;
    // Small-sample synthetic runs generalize best with light decay and the
    // fully annealed final model; the per-pair validation density is too
    // noisy there to pick checkpoints. The longer lorenz runs keep periodic
    // checkpoint selection.
    t.weight_decay = syn ? 2e-4 : 5e-4;
    t.val_interval = syn ? t.epochs : 10;
    t.val_normalizer_draws = 2000;
    if (tr.take("loss", v)) {
      if (v == "sym")
        t.loss_mode = LossMode::sym;
      else if (v == "phi_y")
        t.loss_mode = LossMode::phi_y;
      else if (v == "y_phi")
        t.loss_mode = LossMode::y_phi;
      else
        throw ConfigError("training.loss must be sym, phi_y or y_phi, got '" + v + "'");
    }
    if (tr.take("tau", v)) t.tau = parse_double("tau", v);
    if (tr.take("lambda_intra", v)) t.intra_weight = parse_double("lambda_intra", v);
    if (tr.take("bank_capacity", v)) t.bank_capacity = parse_u32("bank_capacity", v);
    if (tr.take("epochs", v)) t.epochs = parse_u32("epochs", v);
    if (tr.take("batch_size", v)) t.batch_size = parse_u32("batch_size", v);
    if (tr.take("learning_rate", v)) t.learning_rate = parse_double("learning_rate", v);
    if (tr.take("weight_decay", v)) t.weight_decay = parse_double("weight_decay", v);
    if (tr.take("val_interval_epochs", v)) t.val_interval = parse_u32("val_interval_epochs", v);
    if (tr.take("val_normalizer_draws", v))
      t.val_normalizer_draws = parse_u32("val_normalizer_draws", v);
    tr.reject_leftovers();
    t.validate();
  }

  {
    KeyReader inf(sections["inference"], "inference");
    std::string v;
    if (inf.take("normalizer_draws", v)) cfg.normalizer_draws = parse_u32("normalizer_draws", v);
    if (inf.take("sample_count", v)) cfg.sample_count = parse_u32("sample_count", v);
    if (inf.take("envelope_inflation", v))
      cfg.envelope_inflation = parse_double("envelope_inflation", v);
    if (inf.take("mmd_sigmas", v)) cfg.mmd_sigmas = parse_double_list("mmd_sigmas", v);
    if (inf.take("l1_prior_draws", v)) cfg.l1_prior_draws = parse_u32("l1_prior_draws", v);
    if (inf.take("mmd_sample_count", v)) cfg.mmd_sample_count = parse_u32("mmd_sample_count", v);
    if (inf.take("redundancy_grid_points", v))
      cfg.redundancy_grid_points = parse_u32("redundancy_grid_points", v);
    if (inf.take("redundancy_sweep_points", v))
      cfg.redundancy_sweep_points = parse_u32("redundancy_sweep_points", v);
    inf.reject_leftovers();
    if (cfg.normalizer_draws == 0) throw ConfigError("inference.normalizer_draws must be positive");
    if (!(cfg.envelope_inflation > 0.0))
      throw ConfigError("inference.envelope_inflation must be positive");
    for (double s : cfg.mmd_sigmas)
      if (!(s > 0.0)) throw ConfigError("inference.mmd_sigmas must all be positive");
    if (cfg.l1_prior_draws == 0) throw ConfigError("inference.l1_prior_draws must be positive");
    if (cfg.redundancy_sweep_points < 2)
      throw ConfigError("inference.redundancy_sweep_points needs at least two values");
  }

  {
    KeyReader run(sections["run"], "run");
    std::string v;
    if (run.take("seed", v)) cfg.seed = parse_u64("seed", v);
    if (run.take("threads", v)) cfg.threads = parse_u32("threads", v);
    run.reject_leftovers();
    if (cfg.threads == 0) throw ConfigError("run.threads must be positive");
  }

  cfg.training.seed = cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path));
}

std::string describe_process(const RunConfig& cfg) {
  std::ostringstream out;
  if (cfg.kind == SimKind::synthetic) {
    const SyntheticModel& m = cfg.synthetic;
    out << "kind=synthetic\n"
        << "kappa=" << fmt(m.kappa) << "\n"
        << "a_matrix=" << fmt(m.a[0]) << ',' << fmt(m.a[1]) << ',' << fmt(m.a[2]) << ','
        << fmt(m.a[3]) << "\n"
        << "decoder_seed=" << m.decoder_seed << "\n"
        << "redundant=" << (m.redundant ? "true" : "false") << "\n"
        << "prior_angle_lo_rad=" << fmt(cfg.prior.angle_lo) << "\n"
        << "prior_angle_hi_rad=" << fmt(cfg.prior.angle_hi) << "\n";
  } else {
    const Lorenz96Model& m = cfg.lorenz;
    out << "kind=lorenz\n"
        << "slow_count=" << m.slow_count << "\n"
        << "fast_per_slow=" << m.fast_per_slow << "\n"
        << "coupling=" << fmt(m.coupling_c) << "\n"
        << "dt_time_units=" << fmt(m.dt) << "\n"
        << "trajectory_steps=" << m.trajectory_steps << "\n"
        << "crop_steps=" << m.crop_steps << "\n"
        << "augment=" << (m.augment == Lorenz96Model::Augment::crop ? "crop" : "fresh") << "\n"
        << "prior_box_lo=" << fmt(cfg.prior.lo.at(0)) << "\n"
        << "prior_box_hi=" << fmt(cfg.prior.hi.at(0)) << "\n";
  }
  return out.str();
}

}  // namespace ee
