#include "wci/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wci/parallel.hpp"

namespace wci {

std::vector<double> null_statistic_draws(const ConditionalModel& null_model,
                                         int n, int reps, const TestConfig& base,
                                         std::uint64_t seed, int jobs) {
  TestConfig cfg = base;
  cfg.n = n;
  cfg.validate();
  const int d = cfg.resolved_bins();
  const double l = std::log2(static_cast<double>(d));
  const double norm = std::sqrt(static_cast<double>(d)) * l * l;

  std::vector<double> draws(static_cast<std::size_t>(reps), 0.0);
  parallel_for(jobs, reps, [&](long rep) {
    Rng rng = make_rng(derive_seed(seed, "calibrate", static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(rep)));
    const Dataset data = sample_dataset(null_model, n, rng);
    TestConfig rep_cfg = cfg;
    rep_cfg.rng_seed = derive_seed(seed, "calibrate-eta", static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(rep));
    const TestReport report = run_test(data, rep_cfg, rng);
    // Overflow draws never reject, so they contribute the smallest value.
    draws[static_cast<std::size_t>(rep)] =
        report.accepted_by_overflow ? 0.0 : report.T / norm;
  });
  return draws;
}

double calibrate_zeta(const ConditionalModel& null_model, int n, int reps,
                      double alpha, std::uint64_t seed, const TestConfig& base,
                      double zeta_min, int jobs) {
  if (reps < 100) throw std::invalid_argument("calibrate_zeta: reps must be >= 100");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("calibrate_zeta: alpha must be in (0,1)");
  std::vector<double> draws = null_statistic_draws(null_model, n, reps, base, seed, jobs);
  std::sort(draws.begin(), draws.end());
  // Order statistic ceil((1-alpha) reps), 1-based.
  const auto rank = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(reps)));
  const double q = draws[std::min(rank, draws.size()) - 1];
  return q > zeta_min ? q : zeta_min;
}

}  // namespace wci
