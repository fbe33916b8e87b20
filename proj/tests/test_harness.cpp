#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mini_schema.hpp"
#include "wci/experiment.hpp"
#include "wci/models.hpp"

using namespace wci;
namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string wci_bin() {
  const char* bin = std::getenv("WCI_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

CommandResult run_command_env(const std::string& env, const std::string& args) {
  const fs::path out_file = fs::temp_directory_path() / "wci_cmd_out.txt";
  const fs::path err_file = fs::temp_directory_path() / "wci_cmd_err.txt";
  const std::string cmd = (env.empty() ? "" : "env " + env + " ") + wci_bin() + " " + args +
                          " >" + out_file.string() + " 2>" + err_file.string();
  const int status = std::system(cmd.c_str());
  CommandResult res;
  res.exit_code = WEXITSTATUS(status);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  res.out = slurp(out_file);
  res.err = slurp(err_file);
  return res;
}

CommandResult run_command(const std::string& args) { return run_command_env("", args); }

fs::path write_temp_csv(const std::string& name, const Dataset& data) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  write_dataset_csv(out, data);
  return path;
}

std::string slurp_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load_schema(const char* name) {
  const fs::path here = fs::path(__FILE__).parent_path();
  return nlohmann::json::parse(slurp_file(here / ".." / "docs" / "schemas" / name));
}

}  // namespace

TEST_CASE("cli test command: report schema, exit codes, determinism") {
  Rng rng = make_rng(8);
  const Dataset data = sample_dataset(null_independent_uniform(), 400, rng);
  const fs::path csv = write_temp_csv("wci_null.csv", data);

  const std::string args = "test " + csv.string() + " --n 300 --seed 5";
  const CommandResult a = run_command(args);
  CHECK((a.exit_code == 0 || a.exit_code == 1));
  const nlohmann::json report = nlohmann::json::parse(a.out);
  std::string why;
  CHECK_MESSAGE(wci_test::validate_schema(load_schema("test-report.schema.json"), report, &why), why);
  CHECK(report["n"] == 300);
  CHECK(report["d"] == 10);

  // Same seed, byte-identical output; deterministic exit code.
  const CommandResult b = run_command(args);
  CHECK(a.out == b.out);
  CHECK(a.exit_code == b.exit_code);

  // Deterministic no-poissonize run consumes exactly n rows.
  const CommandResult c = run_command("test " + csv.string() + " --no-poissonize --n 400 --seed 9");
  const nlohmann::json creport = nlohmann::json::parse(c.out);
  CHECK(creport["N"] == 400);
  CHECK_FALSE(creport["eta_approximate"].get<bool>());
}

TEST_CASE("cli test command rejects bad data with the offending row") {
  const fs::path path = fs::temp_directory_path() / "wci_bad.csv";
  {
    std::ofstream out(path);
    out << "x,y,z\n0.5,0.5,0.5\n0.2,1.5,0.2\n";
  }
  const CommandResult res = run_command("test " + path.string() + " --n 6");
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("row 3") != std::string::npos);

  const CommandResult usage = run_command("test");
  CHECK(usage.exit_code == 2);
}

TEST_CASE("cli calibrate command emits a schema-valid report") {
  const CommandResult res = run_command(
      "calibrate --model null_independent_uniform --n 120 --reps 150 --alpha 0.1 "
      "--seed 4 --jobs 2");
  REQUIRE(res.exit_code == 0);
  const nlohmann::json report = nlohmann::json::parse(res.out);
  std::string why;
  CHECK_MESSAGE(
      wci_test::validate_schema(load_schema("calibrate-report.schema.json"), report, &why),
      why);
  CHECK(report["zeta"].get<double>() > 0.0);
}

TEST_CASE("cli verify command") {
  const CommandResult unknown = run_command("verify no_such_suite");
  CHECK(unknown.exit_code == 2);

  const CommandResult ustat = run_command("verify ustat");
  CHECK(ustat.exit_code == 0);
  CHECK(ustat.out.find("suite ustat") != std::string::npos);
  CHECK(ustat.out.find("FAIL") == std::string::npos);
}

TEST_CASE("risk experiment: outputs, schema, jobs-independence") {
  ExperimentSpec spec;
  spec.models = {{.name = "null_independent_uniform"}, {.name = "alt_deterministic_dependence"}};
  spec.n_grid = {120, 200};
  spec.reps = 12;
  spec.base.zeta = 0.01;
  spec.base.eta_subsample = 16;
  spec.master_seed = 99;
  spec.jobs = 1;
  const fs::path dir1 = fs::temp_directory_path() / "wci_risk1";
  fs::remove_all(dir1);
  spec.out_dir = dir1.string();
  const ExperimentResult r1 = run_risk(spec);
  REQUIRE(r1.rows.size() == 4);
  for (const RiskPoint& p : r1.rows) {
    CHECK(p.rejection_rate >= 0.0);
    CHECK(p.rejection_rate <= 1.0);
    CHECK(p.se == doctest::Approx(std::sqrt(p.rejection_rate * (1 - p.rejection_rate) / p.reps)));
  }
  // Power of the dependent alternative should dominate the null's rate.
  CHECK(r1.rows[1].rejection_rate >= r1.rows[0].rejection_rate);

  CHECK(fs::exists(dir1 / "result.csv"));
  CHECK(fs::exists(dir1 / "report.json"));
  CHECK(fs::exists(dir1 / "rejection_rate.csv"));
  CHECK(fs::file_size(dir1 / "rejection_rate.png") > 100);

  std::string why;
  const nlohmann::json report = nlohmann::json::parse(slurp_file(dir1 / "report.json"));
  CHECK_MESSAGE(wci_test::validate_schema(load_schema("risk-report.schema.json"), report, &why), why);

  // Same seed with more workers produces byte-identical result.csv.
  const fs::path dir2 = fs::temp_directory_path() / "wci_risk2";
  fs::remove_all(dir2);
  spec.out_dir = dir2.string();
  spec.jobs = 4;
  run_risk(spec);
  CHECK(slurp_file(dir1 / "result.csv") == slurp_file(dir2 / "result.csv"));
  CHECK(slurp_file(dir1 / "rejection_rate.csv") == slurp_file(dir2 / "rejection_rate.csv"));

  // Power against the dependent alternative is nondecreasing in n within
  // two standard errors.
  const RiskPoint& alt_small = r1.rows[1];
  const RiskPoint& alt_large = r1.rows[3];
  CHECK(alt_large.rejection_rate >=
        alt_small.rejection_rate - 2 * (alt_small.se + alt_large.se));
}

TEST_CASE("WCI_SEED env var is the master-seed fallback; flags win") {
  Rng rng = make_rng(12);
  const Dataset data = sample_dataset(null_independent_uniform(), 200, rng);
  const fs::path csv = write_temp_csv("wci_env.csv", data);
  const CommandResult flagged = run_command("test " + csv.string() + " --n 150 --seed 21");
  const CommandResult env = run_command_env("WCI_SEED=21", "test " + csv.string() + " --n 150");
  CHECK(flagged.out == env.out);
  const CommandResult wins =
      run_command_env("WCI_SEED=99", "test " + csv.string() + " --n 150 --seed 21");
  CHECK(wins.out == flagged.out);
}

TEST_CASE("risk experiment: adding a model never perturbs another stream") {
  ExperimentSpec solo;
  solo.models = {{.name = "null_independent_uniform"}};
  solo.n_grid = {150};
  solo.reps = 15;
  solo.base.zeta = 0.01;
  solo.base.eta_subsample = 8;
  solo.master_seed = 12345;
  const ExperimentResult a = run_risk(solo);

  ExperimentSpec both = solo;
  both.models = {{.name = "alt_deterministic_dependence"}, {.name = "null_independent_uniform"}};
  const ExperimentResult b = run_risk(both);
  REQUIRE(b.rows.size() == 2);
  CHECK(a.rows[0].mean_T == b.rows[1].mean_T);
  CHECK(a.rows[0].rejections == b.rows[1].rejections);
}

TEST_CASE("risk spec validation") {
  ExperimentSpec spec;
  spec.models = {{.name = "null_independent_uniform"}};
  CHECK_THROWS_AS(run_risk(spec), std::invalid_argument);  // empty n grid
  spec.n_grid = {300, 200};
  CHECK_THROWS_AS(run_risk(spec), std::invalid_argument);  // not increasing
  spec.n_grid = {200};
  spec.reps = 0;
  CHECK_THROWS_AS(run_risk(spec), std::invalid_argument);
}

TEST_CASE("rate runner: determinism and the non-bracketing path") {
  RateSpec spec;
  spec.n_grid = {150, 250};
  spec.probe_reps = 15;
  spec.bisect_steps = 4;
  spec.calibrate = false;
  spec.base.zeta = 0.02;
  spec.base.eta_subsample = 8;
  spec.master_seed = 5150;
  const fs::path dir1 = fs::temp_directory_path() / "wci_rate1";
  const fs::path dir2 = fs::temp_directory_path() / "wci_rate2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  spec.out_dir = dir1.string();
  const RateResult r1 = run_rate(spec);
  spec.out_dir = dir2.string();
  const RateResult r2 = run_rate(spec);
  REQUIRE(r1.rows.size() == 2);
  CHECK(r1.rows[0].theta_star == r2.rows[0].theta_star);  // fixed seed, fixed table
  CHECK(slurp_file(dir1 / "result.csv") == slurp_file(dir2 / "result.csv"));

  std::string why;
  const nlohmann::json report = nlohmann::json::parse(slurp_file(dir1 / "report.json"));
  CHECK_MESSAGE(wci_test::validate_schema(load_schema("rate-report.schema.json"), report, &why), why);

  // An absurd threshold keeps power below target: reported, not fatal.
  RateSpec hopeless = spec;
  hopeless.base.zeta = 1000.0;
  hopeless.out_dir.clear();
  const RateResult r3 = run_rate(hopeless);
  CHECK_FALSE(r3.rows[0].bracketed);
  CHECK(r3.slope == 0.0);
}

TEST_CASE("binomial standard error halves when reps quadruple") {
  // se = sqrt(p (1-p) / reps): with the rate held fixed, doubling reps
  // shrinks se by sqrt(2).
  const double p = 0.3;
  const double se200 = std::sqrt(p * (1 - p) / 200);
  const double se400 = std::sqrt(p * (1 - p) / 400);
  CHECK(se400 / se200 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}
