#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "wci/measure.hpp"
#include "wci/rng.hpp"

namespace wci {

/// Tuning parameters of the test pipeline.
struct TestConfig {
  int n = 0;                    // sample budget
  int d = 0;                    // Z-bin count; 0 resolves to ceil(n^{2/5})
  double zeta = 2.0;            // threshold constant; run calibrate_zeta for
                                // your null family rather than trusting this
  int eta_subsample = 0;        // 0 = exact full eta enumeration; M >= 1 draws
                                // M eta points instead (flagged approximate)
  std::uint64_t rng_seed = 0;
  bool poissonize = true;

  int resolved_bins() const;    // d, applying the default
  void validate() const;        // throws std::invalid_argument
};

/// Smallest d with d^(5/2) >= n, i.e. ceil(n^{2/5}).
int default_bin_count(int n);

/// Threshold zeta * sqrt(d) * (log2 d)^2.
double threshold_tau(double zeta, int d);

/// Poisson(n/2) sample-size draw.
int poissonize(int n, Rng& rng);

/// Z-bin index in 1..d; bins are [(m-1)/d, m/d), the last closed at 1.
int bin_index_z(double z, int d);

struct BinnedDataset {
  int d = 0;
  std::vector<std::vector<Eigen::Vector2d>> bins;  // (x,y) pairs per bin
  std::vector<int> counts;                         // sigma_m

  int total() const;
};

BinnedDataset bin_by_z(const Dataset& data, int d);

/// Full decision record of one test run.
struct TestReport {
  int n = 0;
  int N = 0;                    // Poisson draw (or n when bypassed)
  bool accepted_by_overflow = false;
  double T = 0;
  double tau = 0;
  bool reject = false;
  int d = 0;
  int depth = 0;                // ceil(log2 d)
  double zeta = 0;
  Eigen::MatrixXd per_level_per_bin;  // depth x d, eta-averaged contributions
  long eta_count = 0;           // eta points averaged over
  bool eta_approximate = false; // true when eta_subsample was used
};

/// The weighted multiresolution statistic
///   T = E_eta sum_{k=1..K} 4^-k sum_m U(bin m at level k) 1(sigma_m >= 4) sigma_m
/// over the data as given (already truncated to N samples). The exact eta
/// average is computed by grouping eta points into offset classes per level,
/// which is algebraically identical to enumerating the full eta grid.
TestReport statistic_T(const Dataset& data, const TestConfig& cfg);

/// Full pipeline: Poisson draw, truncation to the first N samples, binning,
/// statistic, threshold comparison. Rejects iff T >= tau and N <= n.
TestReport run_test(const Dataset& data, const TestConfig& cfg, Rng& rng);
TestReport run_test(const Dataset& data, const TestConfig& cfg);

}  // namespace wci
