#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "wci/calibrate.hpp"
#include "wci/citest.hpp"
#include "wci/experiment.hpp"
#include "wci/measure.hpp"
#include "wci/verify.hpp"

namespace {

using nlohmann::json;

std::uint64_t env_seed() {
  if (const char* v = std::getenv("WCI_SEED")) return std::strtoull(v, nullptr, 10);
  return 0;
}

json report_to_json(const wci::TestReport& r) {
  json table = json::array();
  for (Eigen::Index k = 0; k < r.per_level_per_bin.rows(); ++k) {
    json row = json::array();
    for (Eigen::Index m = 0; m < r.per_level_per_bin.cols(); ++m)
      row.push_back(r.per_level_per_bin(k, m));
    table.push_back(row);
  }
  return {{"schema", "wci-test-report/1"},
          {"n", r.n},
          {"N", r.N},
          {"accepted_by_overflow", r.accepted_by_overflow},
          {"T", r.T},
          {"tau", r.tau},
          {"reject", r.reject},
          {"d", r.d},
          {"depth", r.depth},
          {"zeta", r.zeta},
          {"eta_count", r.eta_count},
          {"eta_approximate", r.eta_approximate},
          {"per_level_per_bin", table}};
}

std::vector<int> parse_n_grid(const std::string& csv) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start < csv.size()) {
    const std::size_t comma = csv.find(',', start);
    out.push_back(std::stoi(csv.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein conditional independence testing toolkit"};
  app.require_subcommand(1);

  // ---- test ----------------------------------------------------------
  auto* cmd_test = app.add_subcommand("test", "run the CI test on a CSV dataset");
  std::string test_file;
  wci::TestConfig cfg;
  bool no_poissonize = false;
  std::uint64_t seed = env_seed();
  cmd_test->add_option("file", test_file, "dataset CSV with header x,y,z")->required();
  cmd_test->add_option("--n", cfg.n, "sample budget (default: all rows)");
  cmd_test->add_option("--d", cfg.d, "Z-bin count (default: ceil(n^{2/5}))");
  cmd_test->add_option("--zeta", cfg.zeta,
                       "threshold constant; calibrate for your null family "
                       "instead of relying on this default");
  cmd_test->add_option("--seed", seed, "rng seed (env WCI_SEED is the fallback)");
  cmd_test->add_option("--eta-subsample", cfg.eta_subsample,
                       "approximate E_eta with M sampled eta points (0 = exact)");
  cmd_test->add_flag("--no-poissonize", no_poissonize, "use all n samples, no Poisson draw");

  // ---- calibrate ------------------------------------------------------
  auto* cmd_cal = app.add_subcommand("calibrate", "calibrate zeta on a null model");
  std::string model_name = "null_independent_uniform";
  int model_d = 0;
  double model_theta = 0;
  std::uint64_t nu_seed = 0;
  int cal_n = 2000, cal_reps = 2000, jobs = 1;
  double alpha = 0.05;
  cmd_cal->add_option("--model", model_name, "null model name");
  cmd_cal->add_option("--n", cal_n, "sample size");
  cmd_cal->add_option("--reps", cal_reps, "null replications")->check(CLI::Range(100, 1000000));
  cmd_cal->add_option("--alpha", alpha, "target level");
  cmd_cal->add_option("--seed", seed, "master seed");
  cmd_cal->add_option("--d", model_d, "bump count for alt_four_corner");
  cmd_cal->add_option("--theta", model_theta, "theta for alt_four_corner");
  cmd_cal->add_option("--nu-seed", nu_seed, "sign seed for alt_four_corner");
  cmd_cal->add_option("--eta-subsample", cfg.eta_subsample, "eta subsample size");
  cmd_cal->add_option("--jobs", jobs, "worker threads");
  cmd_cal->add_flag("--no-poissonize", no_poissonize, "disable the Poisson draw");

  // ---- risk -----------------------------------------------------------
  auto* cmd_risk = app.add_subcommand("risk", "rejection-rate experiment over models and n");
  std::string models_csv = "null_independent_uniform";
  std::string n_grid_csv = "500,1000,2000";
  std::string out_dir;
  int reps = 500;
  bool do_calibrate = false;
  int calib_reps = 2000;
  cmd_risk->add_option("--model", models_csv, "comma-separated model names");
  cmd_risk->add_option("--n-grid", n_grid_csv, "comma-separated sample sizes");
  cmd_risk->add_option("--reps", reps, "replications per grid point");
  cmd_risk->add_option("--zeta", cfg.zeta, "fixed threshold constant");
  cmd_risk->add_flag("--calibrate", do_calibrate, "calibrate zeta per n on the uniform null");
  cmd_risk->add_option("--calib-reps", calib_reps, "calibration replications");
  cmd_risk->add_option("--alpha", alpha, "calibration level");
  cmd_risk->add_option("--d", model_d, "bump count for alt_four_corner");
  cmd_risk->add_option("--theta", model_theta, "theta for alt_four_corner");
  cmd_risk->add_option("--nu-seed", nu_seed, "sign seed for alt_four_corner");
  cmd_risk->add_option("--seed", seed, "master seed");
  cmd_risk->add_option("--jobs", jobs, "worker threads");
  cmd_risk->add_option("--out", out_dir, "output directory")->required();
  cmd_risk->add_option("--eta-subsample", cfg.eta_subsample, "eta subsample size");
  cmd_risk->add_flag("--no-poissonize", no_poissonize, "disable the Poisson draw");

  // ---- rate -----------------------------------------------------------
  auto* cmd_rate = app.add_subcommand("rate", "detectable-separation rate probe");
  std::string rate_grid_csv = "500,1000,2000,4000,8000";
  int probe_reps = 200;
  cmd_rate->add_option("--n-grid", rate_grid_csv, "comma-separated sample sizes");
  cmd_rate->add_option("--reps", probe_reps, "replications per bisection probe");
  cmd_rate->add_option("--zeta", cfg.zeta, "fixed threshold constant");
  cmd_rate->add_option("--calib-reps", calib_reps, "calibration replications");
  cmd_rate->add_option("--alpha", alpha, "calibration level");
  cmd_rate->add_option("--nu-seed", nu_seed, "sign seed for the bump family");
  cmd_rate->add_option("--seed", seed, "master seed");
  cmd_rate->add_option("--jobs", jobs, "worker threads");
  cmd_rate->add_option("--out", out_dir, "output directory")->required();
  cmd_rate->add_option("--eta-subsample", cfg.eta_subsample, "eta subsample size");
  cmd_rate->add_flag("--no-poissonize", no_poissonize, "disable the Poisson draw");

  // ---- verify ---------------------------------------------------------
  auto* cmd_verify = app.add_subcommand("verify", "run the library's property suites");
  std::string suite = "all";
  cmd_verify->add_option("suite", suite, "facts|weedbach|indykthaper|ustat|lowerbound|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.poissonize = !no_poissonize;
  cfg.rng_seed = seed;

  try {
    if (*cmd_test) {
      const wci::Dataset data = wci::read_dataset_csv_file(test_file);
      if (cfg.n == 0) cfg.n = static_cast<int>(data.size());
      wci::Rng rng = wci::make_rng(seed);
      const wci::TestReport report = wci::run_test(data, cfg, rng);
      std::cout << report_to_json(report).dump(2) << '\n';
      return report.reject ? 1 : 0;
    }
    if (*cmd_cal) {
      const wci::ConditionalModel model =
          wci::make_model(model_name, model_d, model_theta, nu_seed);
      const double zeta =
          wci::calibrate_zeta(model, cal_n, cal_reps, alpha, seed, cfg, 1e-3, jobs);
      std::cout << json{{"schema", "wci-calibrate-report/1"},
                        {"model", model_name},
                        {"n", cal_n},
                        {"reps", cal_reps},
                        {"alpha", alpha},
                        {"zeta", zeta}}
                       .dump(2)
                << '\n';
      return 0;
    }
    if (*cmd_risk) {
      wci::ExperimentSpec spec;
      std::size_t start = 0;
      while (start < models_csv.size()) {
        const std::size_t comma = models_csv.find(',', start);
        wci::ModelParams params;
        params.name = models_csv.substr(start, comma - start);
        params.d = model_d;
        params.theta = model_theta;
        params.nu_seed = nu_seed;
        spec.models.push_back(params);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      spec.n_grid = parse_n_grid(n_grid_csv);
      spec.reps = reps;
      spec.base = cfg;
      spec.calibrate = do_calibrate;
      spec.calib_reps = calib_reps;
      spec.alpha = alpha;
      spec.master_seed = seed;
      spec.out_dir = out_dir;
      spec.jobs = jobs;
      run_risk(spec);
      std::cout << "wrote " << out_dir << "/result.csv\n";
      return 0;
    }
    if (*cmd_rate) {
      wci::RateSpec spec;
      spec.n_grid = parse_n_grid(rate_grid_csv);
      spec.probe_reps = probe_reps;
      spec.base = cfg;
      spec.calibrate = true;
      spec.calib_reps = calib_reps;
      spec.alpha = alpha;
      spec.master_seed = seed;
      spec.nu_seed = nu_seed == 0 ? 1 : nu_seed;
      spec.out_dir = out_dir;
      spec.jobs = jobs;
      const wci::RateResult result = run_rate(spec);
      std::cout << "fitted slope of psi* vs n: " << result.slope << "\nwrote " << out_dir
                << "/result.csv\n";
      return 0;
    }
    if (*cmd_verify) {
      const std::vector<wci::VerifyResult> results = wci::verify_suite(suite);
      bool ok = true;
      for (const wci::VerifyResult& r : results) {
        std::cout << "suite " << r.suite << ": " << r.passed << " passed, " << r.failed
                  << " failed\n";
        for (const std::string& line : r.lines) std::cout << "  " << line << '\n';
        ok = ok && r.ok();
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
