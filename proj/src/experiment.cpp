#include "wci/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wci/calibrate.hpp"
#include "wci/parallel.hpp"
#include "wci/plot.hpp"

namespace wci {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

struct RepOutcome {
  bool reject = false;
  double T = 0;
  int N = 0;
};

// One Monte Carlo grid point; rep r uses the seed derived from
// (master, model id, n, r) so adding models or grid points never shifts
// another stream.
RiskPoint risk_point(const ModelParams& params, const ConditionalModel& model,
                     int n, double zeta, const TestConfig& base, int reps,
                     std::uint64_t master_seed, int jobs) {
  const auto start = std::chrono::steady_clock::now();
  TestConfig cfg = base;
  cfg.n = n;
  cfg.zeta = zeta;
  cfg.validate();

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
  parallel_for(jobs, reps, [&](long rep) {
    Rng rng = make_rng(derive_seed(master_seed, params.id(), static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(rep)));
    const Dataset data = sample_dataset(model, n, rng);
    TestConfig rep_cfg = cfg;
    rep_cfg.rng_seed = derive_seed(master_seed, params.id() + "/eta",
                                   static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(rep));
    const TestReport report = run_test(data, rep_cfg, rng);
    outcomes[static_cast<std::size_t>(rep)] = {report.reject, report.T, report.N};
  });

  RiskPoint point;
  point.model = params.id();
  point.n = n;
  point.d = cfg.resolved_bins();
  point.zeta = zeta;
  point.tau = threshold_tau(zeta, point.d);
  point.reps = reps;
  double sum_T = 0, sum_T2 = 0, sum_N = 0;
  for (const RepOutcome& o : outcomes) {
    point.rejections += o.reject;
    sum_T += o.T;
    sum_T2 += o.T * o.T;
    sum_N += o.N;
  }
  point.rejection_rate = static_cast<double>(point.rejections) / reps;
  point.se = std::sqrt(point.rejection_rate * (1.0 - point.rejection_rate) / reps);
  point.mean_T = sum_T / reps;
  point.var_T = reps > 1 ? (sum_T2 - reps * point.mean_T * point.mean_T) / (reps - 1) : 0.0;
  point.mean_N = sum_N / reps;
  const int depth = [&] { int k = 0; while ((1 << k) < point.d) ++k; return k; }();
  point.eta_count = cfg.eta_subsample > 0
                        ? cfg.eta_subsample
                        : static_cast<long>(((1L << (depth + 1)) + 1)) *
                              (((1L << (depth + 1)) + 1));
  point.eta_approximate = cfg.eta_subsample > 0;
  point.wall_ms = elapsed_ms(start);
  return point;
}

}  // namespace

std::string ModelParams::id() const {
  if (name != "alt_four_corner") return name;
  std::ostringstream s;
  s << name << "(d=" << d << ",theta=" << theta << ",nu=" << nu_seed
    << ",delta=" << (delta_sign > 0 ? "+" : "-") << ")";
  return s.str();
}

void ExperimentSpec::validate() const {
  if (models.empty()) throw std::invalid_argument("experiment: no models");
  if (n_grid.empty()) throw std::invalid_argument("experiment: empty n grid");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
    throw std::invalid_argument("experiment: n grid must be strictly increasing");
  if (reps < 1) throw std::invalid_argument("experiment: reps must be >= 1");
  if (calibrate && calib_reps < 100)
    throw std::invalid_argument("experiment: calib_reps must be >= 100");
}

ExperimentResult run_risk(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.master_seed = spec.master_seed;
  result.jobs = spec.jobs;

  const ConditionalModel uniform_null = null_independent_uniform();
  for (const int n : spec.n_grid) {
    double zeta = spec.base.zeta;
    if (spec.calibrate) {
      zeta = calibrate_zeta(uniform_null, n, spec.calib_reps, spec.alpha,
                            derive_seed(spec.master_seed, "calibration", static_cast<std::uint64_t>(n)),
                            spec.base, 1e-3, spec.jobs);
    }
    for (const ModelParams& params : spec.models) {
      const ConditionalModel model = params.build();
      result.rows.push_back(risk_point(params, model, n, zeta, spec.base, spec.reps,
                                       spec.master_seed, spec.jobs));
    }
  }
  if (!spec.out_dir.empty()) write_risk_outputs(spec, result);
  return result;
}

void RateSpec::validate() const {
  if (n_grid.empty()) throw std::invalid_argument("rate: empty n grid");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()))
    throw std::invalid_argument("rate: n grid must be increasing");
  if (probe_reps < 1) throw std::invalid_argument("rate: probe_reps must be >= 1");
  if (!(power_target > 0 && power_target < 1))
    throw std::invalid_argument("rate: power target must be in (0,1)");
}

namespace {

double probe_power(const ModelParams& params, int n, double zeta,
                   const TestConfig& base, int reps, std::uint64_t master_seed,
                   int jobs) {
  const ConditionalModel model = params.build();
  std::vector<char> rejects(static_cast<std::size_t>(reps), 0);
  parallel_for(jobs, reps, [&](long rep) {
    Rng rng = make_rng(derive_seed(master_seed, params.id(), static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(rep)));
    const Dataset data = sample_dataset(model, n, rng);
    TestConfig cfg = base;
    cfg.n = n;
    cfg.zeta = zeta;
    cfg.rng_seed = derive_seed(master_seed, params.id() + "/eta",
                               static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
    rejects[static_cast<std::size_t>(rep)] = run_test(data, cfg, rng).reject;
  });
  int hits = 0;
  for (char r : rejects) hits += r;
  return static_cast<double>(hits) / reps;
}

}  // namespace

RateResult run_rate(const RateSpec& spec) {
  spec.validate();
  RateResult result;
  result.master_seed = spec.master_seed;
  const ConditionalModel uniform_null = null_independent_uniform();

  for (const int n : spec.n_grid) {
    RatePoint point;
    point.n = n;
    TestConfig cfg = spec.base;
    cfg.n = n;
    point.test_d = cfg.resolved_bins();
    point.basis_d = std::max(2, point.test_d / 2);

    point.zeta = spec.base.zeta;
    if (spec.calibrate) {
      point.zeta = calibrate_zeta(uniform_null, n, spec.calib_reps, spec.alpha,
                                  derive_seed(spec.master_seed, "rate-calibration",
                                              static_cast<std::uint64_t>(n)),
                                  spec.base, 1e-3, spec.jobs);
    }

    // theta bisection: power is monotone in theta up to the validity cap.
    const double theta_cap = 0.999 * 0.25 * point.basis_d / bump_h_inf();
    auto params_at = [&](double theta) {
      ModelParams p;
      p.name = "alt_four_corner";
      p.d = point.basis_d;
      p.theta = theta;
      p.nu_seed = spec.nu_seed;
      return p;
    };
    auto power_at = [&](double theta) {
      return probe_power(params_at(theta), n, point.zeta, spec.base, spec.probe_reps,
                         spec.master_seed, spec.jobs);
    };

    double hi = theta_cap;
    const double power_hi = power_at(hi);
    if (power_hi < spec.power_target) {
      point.bracketed = false;
      point.theta_star = hi;
      point.power_at_star = power_hi;
    } else {
      point.bracketed = true;
      double lo = 0.0;  // power at theta -> 0 equals the null level < target
      double power_star = power_hi;
      for (int step = 0; step < spec.bisect_steps; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double p = power_at(mid);
        if (p >= spec.power_target) {
          hi = mid;
          power_star = p;
        } else {
          lo = mid;
        }
      }
      point.theta_star = hi;
      point.power_at_star = power_star;
    }
    const BumpBasis basis = make_bump_basis(point.basis_d, point.theta_star, spec.nu_seed);
    point.psi_tilde = separation_tilde_psi(alt_four_corner(basis, 1));
    result.rows.push_back(point);
  }

  // Least-squares slope of log(psi*) against log(n) over bracketed points.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const RatePoint& p : result.rows) {
    if (!p.bracketed || p.psi_tilde <= 0) continue;
    const double lx = std::log(static_cast<double>(p.n));
    const double ly = std::log(p.psi_tilde);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++m;
  }
  result.slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  if (!spec.out_dir.empty()) write_rate_outputs(spec, result);
  return result;
}

std::string risk_result_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "model,n,d,zeta,tau,reps,rejections,rejection_rate,se,mean_T,var_T,mean_N,"
         "eta_count,eta_approximate\n";
  for (const RiskPoint& p : result.rows) {
    out << p.model << ',' << p.n << ',' << p.d << ',' << fmt(p.zeta) << ',' << fmt(p.tau)
        << ',' << p.reps << ',' << p.rejections << ',' << fmt(p.rejection_rate) << ','
        << fmt(p.se) << ',' << fmt(p.mean_T) << ',' << fmt(p.var_T) << ',' << fmt(p.mean_N)
        << ',' << p.eta_count << ',' << (p.eta_approximate ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string rate_result_csv(const RateResult& result) {
  std::ostringstream out;
  out << "n,test_d,basis_d,zeta,theta_star,psi_tilde,power_at_star,bracketed\n";
  for (const RatePoint& p : result.rows) {
    out << p.n << ',' << p.test_d << ',' << p.basis_d << ',' << fmt(p.zeta) << ','
        << fmt(p.theta_star) << ',' << fmt(p.psi_tilde) << ',' << fmt(p.power_at_star)
        << ',' << (p.bracketed ? 1 : 0) << '\n';
  }
  return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

nlohmann::json metadata_json(std::uint64_t master_seed, int jobs,
                             const TestConfig& base) {
  return {{"version", "wci/1.0.0"},
          {"seed", master_seed},
          {"jobs", jobs},
          {"eta_policy", base.eta_subsample > 0
                             ? "subsample:" + std::to_string(base.eta_subsample)
                             : std::string("full")},
          {"poissonize", base.poissonize}};
}

}  // namespace

void write_risk_outputs(const ExperimentSpec& spec, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  const fs::path dir(spec.out_dir);
  write_file(dir / "result.csv", risk_result_csv(result));

  nlohmann::json rows = nlohmann::json::array();
  for (const RiskPoint& p : result.rows) {
    rows.push_back({{"model", p.model},
                    {"n", p.n},
                    {"d", p.d},
                    {"zeta", p.zeta},
                    {"tau", p.tau},
                    {"reps", p.reps},
                    {"rejections", p.rejections},
                    {"rejection_rate", p.rejection_rate},
                    {"se", p.se},
                    {"mean_T", p.mean_T},
                    {"var_T", p.var_T},
                    {"mean_N", p.mean_N},
                    {"eta_count", p.eta_count},
                    {"eta_approximate", p.eta_approximate},
                    {"wall_ms", p.wall_ms}});
  }
  const nlohmann::json report = {{"schema", "wci-risk-report/1"},
                                 {"metadata", metadata_json(result.master_seed, result.jobs, spec.base)},
                                 {"rows", rows}};
  write_file(dir / "report.json", report.dump(2) + "\n");

  // Rejection-rate curves, one series per model, with the plotted numbers in
  // a sibling CSV.
  std::ostringstream plot_csv;
  plot_csv << "model,n,rejection_rate\n";
  std::vector<PlotSeries> series;
  static const std::uint32_t kPalette[] = {0x1f77b4, 0xd62728, 0x2ca02c, 0x9467bd,
                                           0x8c564b, 0xe377c2};
  std::size_t color = 0;
  for (const ModelParams& params : spec.models) {
    PlotSeries s;
    s.rgb = kPalette[color++ % std::size(kPalette)];
    for (const RiskPoint& p : result.rows) {
      if (p.model != params.id()) continue;
      s.x.push_back(p.n);
      s.y.push_back(p.rejection_rate);
      plot_csv << p.model << ',' << p.n << ',' << fmt(p.rejection_rate) << '\n';
    }
    series.push_back(std::move(s));
  }
  write_file(dir / "rejection_rate.csv", plot_csv.str());
  write_line_plot_png((dir / "rejection_rate.png").string(), series);
}

void write_rate_outputs(const RateSpec& spec, const RateResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  const fs::path dir(spec.out_dir);
  write_file(dir / "result.csv", rate_result_csv(result));

  nlohmann::json rows = nlohmann::json::array();
  for (const RatePoint& p : result.rows) {
    rows.push_back({{"n", p.n},
                    {"test_d", p.test_d},
                    {"basis_d", p.basis_d},
                    {"zeta", p.zeta},
                    {"theta_star", p.theta_star},
                    {"psi_tilde", p.psi_tilde},
                    {"power_at_star", p.power_at_star},
                    {"bracketed", p.bracketed}});
  }
  const nlohmann::json report = {{"schema", "wci-rate-report/1"},
                                 {"metadata", metadata_json(result.master_seed, spec.jobs, spec.base)},
                                 {"slope", result.slope},
                                 {"rows", rows}};
  write_file(dir / "report.json", report.dump(2) + "\n");

  std::ostringstream plot_csv;
  plot_csv << "n,psi_tilde\n";
  PlotSeries s;
  s.rgb = 0x1f77b4;
  for (const RatePoint& p : result.rows) {
    if (!p.bracketed) continue;
    s.x.push_back(p.n);
    s.y.push_back(p.psi_tilde);
    plot_csv << p.n << ',' << fmt(p.psi_tilde) << '\n';
  }
  write_file(dir / "separation_rate.csv", plot_csv.str());
  write_line_plot_png((dir / "separation_rate.png").string(), {s}, true, true);
}

}  // namespace wci
