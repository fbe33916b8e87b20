#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wci/measure.hpp"
#include "wci/rng.hpp"

namespace wci {

/// Outcome of one property suite: a pass/fail line per property family.
struct VerifyResult {
  std::string suite;
  std::vector<std::string> lines;
  int passed = 0;
  int failed = 0;

  bool ok() const { return failed == 0; }
  void record(bool pass, const std::string& line);
};

/// Random measure with support size 1..max_support, generic points.
DiscreteMeasure random_discrete_measure(int dim, int max_support, Rng& rng);

/// Random measure supported on the corners of {0,1}^2.
DiscreteMeasure random_corner_measure(Rng& rng);

/// Metric facts about W1/W2 on random discrete measures (five families:
/// corner-support sandwich, W1 <= W2, triangle inequalities, product
/// subadditivity of W2^2, W2^2 <= sqrt(2) W1).
VerifyResult verify_facts(int trials = 200, std::uint64_t seed = 20240901);

/// Multiresolution upper bound dominates the exact W2^2 for every eta in
/// the full eta grid, d in {2,4,8}.
VerifyResult verify_weedbach(int pairs = 100, std::uint64_t seed = 20240902);

/// Eta-averaged multiresolution L1 sum obeys its W1 bound for q in {1,2},
/// phi in {1/2, 1/4, 1/8}.
VerifyResult verify_indykthaper(int pairs = 200, std::uint64_t seed = 20240903);

/// U-statistic unbiasedness by exhaustive enumeration at sigma = 4, and
/// fast-vs-naive equality on random instances.
VerifyResult verify_ustat(int random_instances = 500, std::uint64_t seed = 20240904);

/// Certificates for the perturbed four-corner family on a z-mesh: exact
/// marginal uniformity, dual sandwich, W2^2 vs W1 sandwich, validity.
VerifyResult verify_lowerbound(int mesh = 512, std::uint64_t seed = 20240905);

std::vector<VerifyResult> verify_suite(const std::string& name);

}  // namespace wci
