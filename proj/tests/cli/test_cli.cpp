#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kTinyConfig =
    "[simulator]\n"
    "kind = synthetic\n"
    "[network]\n"
    "encoder_width = 8\n"
    "encoder_blocks = 1\n"
    "emulator_width = 8\n"
    "emulator_blocks = 1\n"
    "[training]\n"
    "epochs = 6\n"
    "batch_size = 16\n"
    "val_interval_epochs = 3\n"
    "val_normalizer_draws = 100\n"
    "[inference]\n"
    "normalizer_draws = 500\n"
    "sample_count = 15\n"
    "l1_prior_draws = 200\n"
    "[run]\n"
    "seed = 61\n";

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "ee_cli";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("EESBI_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "EESBI_CLI must point at the built binary");
  const fs::path dir = workdir();
  const fs::path out_path = dir / "stdout.txt";
  const fs::path err_path = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + bin + "\" " + args + " >" + out_path.string() +
                          " 2>" + err_path.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  REQUIRE(WIFEXITED(status));
  r.code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("argument problems exit with code 1") {
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("solve --config x").code == 1);
  const RunResult missing = run_cli("simulate --config nowhere.ini --out x.eesb");
  CHECK(missing.code == 1);  // --count is required
  CHECK(missing.err.find("--count") != std::string::npos);

  const RunResult help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(help.out.find("infer") != std::string::npos);
}

TEST_CASE("config and io problems map to exit codes 2 and 3") {
  const fs::path dir = workdir();
  const fs::path bad_cfg = dir / "bad.ini";
  spit(bad_cfg, "[simulator]\nkind = synthetic\nwarp = 9\n");
  const RunResult bad = run_cli("simulate --config " + q(bad_cfg) + " --count 2 --out " +
                                q(dir / "x.eesb"));
  CHECK(bad.code == 2);
  CHECK(bad.err.find("unknown key 'warp'") != std::string::npos);

  const RunResult gone =
      run_cli("simulate --config " + q(dir / "missing.ini") + " --count 2 --out " +
              q(dir / "x.eesb"));
  CHECK(gone.code == 3);
  CHECK(!gone.err.empty());
}

TEST_CASE("simulate, train, infer and eval chain end to end") {
  const fs::path dir = workdir();
  const fs::path cfg = dir / "run.ini";
  spit(cfg, kTinyConfig);
  const fs::path train_ds = dir / "train.eesb";
  const fs::path val_ds = dir / "val.eesb";
  const fs::path test_ds = dir / "test.eesb";
  const fs::path ckpt = dir / "model.eeck";
  const fs::path samples = dir / "samples.csv";
  const fs::path reports = dir / "reports.csv";

  const RunResult sim =
      run_cli("simulate --config " + q(cfg) + " --count 32 --out " + q(train_ds));
  CHECK(sim.code == 0);
  CHECK(sim.out.find("wrote 32 records") != std::string::npos);
  CHECK(run_cli("simulate --config " + q(cfg) + " --count 12 --seed 62 --out " + q(val_ds)).code ==
        0);
  CHECK(run_cli("simulate --config " + q(cfg) + " --count 5 --seed 63 --out " + q(test_ds)).code ==
        0);

  // Same seed, same bytes.
  const fs::path again = dir / "train_again.eesb";
  CHECK(run_cli("simulate --config " + q(cfg) + " --count 32 --out " + q(again)).code == 0);
  CHECK(slurp(again) == slurp(train_ds));

  const RunResult trained = run_cli("train --config " + q(cfg) + " --data " + q(train_ds) +
                                    " --val " + q(val_ds) + " --ckpt " + q(ckpt));
  CHECK(trained.code == 0);
  CHECK(trained.out.find("best epoch") != std::string::npos);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(dir / "model.eeck.log.csv"));

  const RunResult inferred =
      run_cli("infer --config " + q(cfg) + " --ckpt " + q(ckpt) + " --obs " + q(test_ds) +
              " --index 2 --out " + q(samples));
  CHECK(inferred.code == 0);
  CHECK(inferred.out.find("accepted 15 of") != std::string::npos);
  {
    std::istringstream in(slurp(samples));
    std::string line;
    std::size_t rows = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
      if (line.rfind("# ", 0) == 0) continue;
      if (!saw_header)
        saw_header = line == "sample_index,phi_0,phi_1,candidate_ordinal";
      else
        ++rows;
    }
    CHECK(saw_header);
    CHECK(rows == 15);
  }
  CHECK(run_cli("infer --config " + q(cfg) + " --ckpt " + q(ckpt) + " --obs " + q(test_ds) +
                " --index 50 --out " + q(samples))
            .code == 1);

  const RunResult scored = run_cli("eval --config " + q(cfg) + " --ckpt " + q(ckpt) + " --test " +
                                   q(test_ds) + " --metrics l1,r2,cv --out " + q(reports));
  CHECK(scored.code == 0);
  CHECK(scored.out.find("l1 p25=") != std::string::npos);
  CHECK(scored.out.find("r2_emulator p25=") != std::string::npos);
  CHECK(fs::exists(reports));
  CHECK(slurp(reports).find("metric,instance,value") != std::string::npos);

  CHECK(run_cli("eval --config " + q(cfg) + " --ckpt " + q(ckpt) + " --test " + q(test_ds) +
                " --metrics sharpness")
            .code == 1);

  // Dataset generated under one process, evaluated under another: config error.
  const fs::path other_cfg = dir / "other.ini";
  spit(other_cfg, std::string(kTinyConfig) + "[simulator]\nkappa = 9\n");
  const RunResult mismatched = run_cli("train --config " + q(other_cfg) + " --data " +
                                       q(train_ds) + " --val " + q(val_ds) + " --ckpt " + q(ckpt));
  CHECK(mismatched.code == 2);
  CHECK(mismatched.err.find("different process") != std::string::npos);
}
