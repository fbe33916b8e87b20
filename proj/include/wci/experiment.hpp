#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wci/citest.hpp"
#include "wci/models.hpp"

namespace wci {

/// Model selection as it appears on the command line.
struct ModelParams {
  std::string name;
  int d = 0;                 // alt_four_corner bump count
  double theta = 0;          // alt_four_corner amplitude parameter
  std::uint64_t nu_seed = 0;
  int delta_sign = 1;

  ConditionalModel build() const { return make_model(name, d, theta, nu_seed, delta_sign); }
  std::string id() const;    // stable label used in outputs and seed derivation
};

struct ExperimentSpec {
  std::vector<ModelParams> models;
  std::vector<int> n_grid;
  int reps = 500;
  TestConfig base;              // n is filled per grid point
  bool calibrate = false;       // calibrate zeta per n on the uniform null
  int calib_reps = 2000;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  std::string out_dir;          // empty: no files written
  int jobs = 1;

  void validate() const;
};

/// Aggregates for one (model, n) grid point.
struct RiskPoint {
  std::string model;
  int n = 0;
  int d = 0;
  double zeta = 0;
  double tau = 0;
  int reps = 0;
  int rejections = 0;
  double rejection_rate = 0;
  double se = 0;              // binomial standard error
  double mean_T = 0;
  double var_T = 0;
  double mean_N = 0;
  long eta_count = 0;
  bool eta_approximate = false;
  double wall_ms = 0;         // reported in report.json only; result.csv stays
                              // byte-identical across runs
};

struct ExperimentResult {
  std::vector<RiskPoint> rows;
  std::uint64_t master_seed = 0;
  int jobs = 0;
};

ExperimentResult run_risk(const ExperimentSpec& spec);

/// Rate probe: per n, bisect theta to the smallest detectable perturbation
/// (power >= power_target), then record the separation functional at theta*.
struct RateSpec {
  std::vector<int> n_grid;
  int probe_reps = 200;
  double power_target = 0.5;
  int bisect_steps = 7;
  TestConfig base;
  bool calibrate = true;
  int calib_reps = 500;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  std::uint64_t nu_seed = 1;
  std::string out_dir;
  int jobs = 1;

  void validate() const;
};

struct RatePoint {
  int n = 0;
  int test_d = 0;
  int basis_d = 0;           // bump count: half the bin count, so bins sit at
                             // twice the bump resolution
  double zeta = 0;
  double theta_star = 0;
  double psi_tilde = 0;      // separation at theta*
  double power_at_star = 0;
  bool bracketed = false;    // power target reached inside the theta range
};

struct RateResult {
  std::vector<RatePoint> rows;
  double slope = 0;          // log-log fit of psi_tilde vs n (bracketed rows)
  std::uint64_t master_seed = 0;
};

RateResult run_rate(const RateSpec& spec);

/// Deterministic CSV serializations (fixed %.17g formatting).
std::string risk_result_csv(const ExperimentResult& result);
std::string rate_result_csv(const RateResult& result);

/// Write result.csv, report.json and plot files into spec.out_dir.
void write_risk_outputs(const ExperimentSpec& spec, const ExperimentResult& result);
void write_rate_outputs(const RateSpec& spec, const RateResult& result);

}  // namespace wci
