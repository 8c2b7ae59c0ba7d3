#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sirlevy/config.hpp"

// Black-box tests: every case drives the installed binary through a shell,
// exactly as a user would.
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("cli-tests-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Runs `SIRLEVY_BIN_PATH <args>`, captures combined stdout/stderr, returns
// the exit code. `env_prefix` may hold VAR=value assignments.
int run_cli(const std::string& args, std::string* output = nullptr,
            const std::string& env_prefix = "") {
  std::string cmd;
  if (!env_prefix.empty()) cmd += env_prefix + " ";
  cmd += std::string(SIRLEVY_BIN_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  if (output) *output = out;
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

// A fast variant of the first scenario for subprocess tests.
fs::path write_small_config(const fs::path& dir, double horizon = 50.0) {
  auto cfg = *sirlevy::preset("fig1");
  cfg.sim.horizon = horizon;
  cfg.sim.record_stride = 10;
  cfg.analysis.window = sirlevy::Window{0.5 * horizon, horizon};
  const fs::path file = dir / "small.json";
  sirlevy::save_config(file, cfg);
  return file;
}

}  // namespace

TEST_CASE("thresholds subcommand reports both preset regimes") {
  TempDir tmp;
  std::string out;
  int rc = run_cli("thresholds fig1 --out " + tmp.path.string(), &out);
  CHECK(rc == 0);
  CHECK(out.find("theta") != std::string::npos);
  CHECK(out.find("ExtinctionPredicted") != std::string::npos);

  json j = read_json(tmp.path / "fig1_thresholds.json");
  CHECK(j["thresholds"]["extinction"]["theta"].get<double>() ==
        doctest::Approx(-0.03693903870262967).epsilon(1e-12));
  CHECK(j["thresholds"]["regime"] == "ExtinctionPredicted");
  CHECK(j["config"]["model"]["beta"].get<double>() == 0.07);
  CHECK(j["provenance"]["tool_version"] == sirlevy::kToolVersion);
  REQUIRE(j["hypotheses"].size() == 5);
  for (const auto& h : j["hypotheses"]) CHECK(h["satisfied"].get<bool>());

  rc = run_cli("--out " + tmp.path.string() + " thresholds fig2", &out);
  CHECK(rc == 0);
  CHECK(out.find("PersistencePredicted") != std::string::npos);
  json j2 = read_json(tmp.path / "fig2_thresholds.json");
  CHECK(j2["thresholds"]["persistence"]["t_tilde"].get<double>() ==
        doctest::Approx(1.034419910683015).epsilon(1e-12));
  CHECK(j2["thresholds"]["persistence"]["persistence_lower_bound"].get<double>() ==
        doctest::Approx(0.005778017734934802).epsilon(1e-12));
}

TEST_CASE("usage errors exit with code 1") {
  std::string out;
  CHECK(run_cli("frobnicate", &out) == 1);
  CHECK(run_cli("thresholds", &out) == 1);  // missing config argument
  CHECK(run_cli("", &out) == 1);            // subcommand required
  CHECK(run_cli("scan fig1 --param beta", &out) == 1);  // missing --from/--to
  CHECK(run_cli("--help", &out) == 0);
  CHECK(out.find("thresholds") != std::string::npos);
  CHECK(run_cli("simulate --help", &out) == 0);
}

TEST_CASE("config errors exit with code 2") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.json";
  {
    std::ofstream f(bad);
    f << R"({"model": {"A": 0.9, "mu1": -0.3, "mu2": 0.5,
             "gamma": 0.05, "beta": 0.07, "eta": 0.09}})";
  }
  std::string out;
  CHECK(run_cli("thresholds " + bad.string(), &out) == 2);
  CHECK(out.find("mu1") != std::string::npos);

  const fs::path broken = tmp.path / "broken.json";
  {
    std::ofstream f(broken);
    f << "{ not json";
  }
  CHECK(run_cli("simulate " + broken.string(), &out) == 2);

  CHECK(run_cli("thresholds " + (tmp.path / "absent.json").string(), &out) == 2);
  CHECK(run_cli("reproduce fig7", &out) == 2);
  CHECK(run_cli("scan fig1 --param zeta --from 0 --to 1", &out) == 2);

  // Deterministic-mode ensembles are meaningless and rejected.
  auto det = sirlevy::apply_mode(*sirlevy::preset("fig1"), sirlevy::Mode::Deterministic);
  det.sim.horizon = 20.0;
  det.analysis.window.reset();
  const fs::path detfile = tmp.path / "det.json";
  sirlevy::save_config(detfile, det);
  CHECK(run_cli("ensemble " + detfile.string(), &out) == 2);
}

TEST_CASE("numerical blow-ups exit with code 3") {
  TempDir tmp;
  const fs::path file = tmp.path / "blowup.json";
  {
    std::ofstream f(file);
    f << R"({"model": {"A": 1e300, "mu1": 0.3, "mu2": 0.5,
                       "gamma": 0.05, "beta": 0.07, "eta": 0.09},
             "sim": {"dt": 1e10, "horizon": 1e10}})";
  }
  std::string out;
  CHECK(run_cli("simulate " + file.string() + " --out " + tmp.path.string(), &out) == 3);
  CHECK(out.find("non-finite") != std::string::npos);
}

TEST_CASE("simulate writes a trajectory CSV and a run report") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  std::string out;
  int rc = run_cli("simulate " + cfg.string() + " --psi --out " + tmp.path.string(), &out);
  CHECK(rc == 0);

  const fs::path csv = tmp.path / "small_trajectory.csv";
  REQUIRE(fs::exists(csv));
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,S,I,D,psi");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 501);  // 50 / 0.01 / stride 10, plus t = 0

  json j = read_json(tmp.path / "small_run.json");
  CHECK(!j["extinction_verdict"].is_null());
  CHECK(!j["persistence_verdict"].is_null());
  CHECK(j["ensemble"].is_null());
  // The report loads back through the typed reader too.
  sirlevy::RunReport rep = sirlevy::read_report(tmp.path / "small_run.json");
  CHECK(rep.extinction.has_value());
  CHECK(rep.persistence.has_value());
}

TEST_CASE("ensemble honors the seed override and writes a summary") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  std::string out;
  int rc = run_cli("ensemble " + cfg.string() + " --seeds 4 --out " + tmp.path.string(),
                   &out);
  CHECK(rc == 0);
  CHECK(out.find("runs: 4") != std::string::npos);

  json j = read_json(tmp.path / "small_ensemble.json");
  REQUIRE(!j["ensemble"].is_null());
  CHECK(j["ensemble"]["n_runs"].get<int>() == 4);
  REQUIRE(j["ensemble"]["records"].size() == 4);
  CHECK(j["ensemble"]["records"][0]["seed"].get<int>() == 101);
  CHECK(j["ensemble"]["records"][3]["seed"].get<int>() == 104);
}

TEST_CASE("verify-lemma2 checks the auxiliary limits end to end") {
  TempDir tmp;
  auto cfg = *sirlevy::preset("fig1");
  cfg.sim.horizon = 500.0;
  cfg.sim.record_stride = 10;
  cfg.analysis.window.reset();
  cfg.analysis.mean_tolerance = 0.10;
  cfg.analysis.square_tolerance = 0.15;
  const fs::path file = tmp.path / "lemma.json";
  sirlevy::save_config(file, cfg);

  std::string out;
  int rc = run_cli("verify-lemma2 " + file.string() + " --seeds 6 --out " +
                       tmp.path.string(),
                   &out);
  CHECK(rc == 0);
  json j = read_json(tmp.path / "lemma_lemma2.json");
  REQUIRE(!j["lemma2"].is_null());
  CHECK(j["lemma2"]["mean_target"].get<double>() == doctest::Approx(3.0));
  CHECK(j["lemma2"]["passed"].get<bool>());
}

TEST_CASE("reproduce writes one file set per mode") {
  TempDir tmp;
  std::string out;
  int rc = run_cli("reproduce fig3 --out " + tmp.path.string(), &out);
  CHECK(rc == 0);
  for (const char* tag : {"deterministic", "degenerate", "full"}) {
    CAPTURE(tag);
    CHECK(fs::exists(tmp.path / ("fig3_" + std::string(tag) + ".csv")));
    CHECK(fs::exists(tmp.path / ("fig3_" + std::string(tag) + ".json")));
  }
  // Single-regime scenarios produce only the full variant.
  TempDir tmp2;
  rc = run_cli("reproduce fig1 --out " + tmp2.path.string(), &out);
  CHECK(rc == 0);
  CHECK(fs::exists(tmp2.path / "fig1_full.csv"));
  CHECK(!fs::exists(tmp2.path / "fig1_deterministic.csv"));

  // Modes recorded in the reports match the variant.
  json det = read_json(tmp.path / "fig3_deterministic.json");
  CHECK(det["config"]["mode"] == "deterministic");
  json deg = read_json(tmp.path / "fig3_degenerate.json");
  CHECK(deg["config"]["mode"] == "degenerate-diffusion");
  CHECK(deg["config"]["noise"]["sigma2"].get<double>() == 0.0);
}

TEST_CASE("scan writes the threshold table") {
  TempDir tmp;
  std::string out;
  int rc = run_cli("scan fig1 --param beta --from 0.07 --to 1.3 --steps 5 --out " +
                       tmp.path.string(),
                   &out);
  CHECK(rc == 0);
  std::ifstream in(tmp.path / "fig1_scan_beta.csv");
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "value,t_star,theta,t_tilde,regime");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("output directory falls back to the environment variable") {
  TempDir tmp;
  const fs::path envdir = tmp.path / "from_env";
  std::string out;
  int rc = run_cli("thresholds fig1", &out,
                   "SIRLEVY_OUTPUT_DIR=" + envdir.string());
  CHECK(rc == 0);
  CHECK(fs::exists(envdir / "fig1_thresholds.json"));
  // An explicit --out wins over the environment.
  const fs::path explicit_dir = tmp.path / "explicit";
  rc = run_cli("thresholds fig1 --out " + explicit_dir.string(), &out,
               "SIRLEVY_OUTPUT_DIR=" + envdir.string());
  CHECK(rc == 0);
  CHECK(fs::exists(explicit_dir / "fig1_thresholds.json"));
}
