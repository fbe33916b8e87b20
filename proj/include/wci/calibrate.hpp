#pragma once

#include <cstdint>
#include <vector>

#include "wci/citest.hpp"
#include "wci/models.hpp"

namespace wci {

/// Draws of the normalized statistic T / (sqrt(d) log2^2 d) under `reps`
/// null simulations of size n; entry r is deterministic given (seed, r).
std::vector<double> null_statistic_draws(const ConditionalModel& null_model,
                                         int n, int reps, const TestConfig& base,
                                         std::uint64_t seed, int jobs = 1);

/// Empirical (1-alpha)-quantile of the normalized null statistic, floored at
/// `zeta_min` when the null simulations degenerate to nonpositive values.
double calibrate_zeta(const ConditionalModel& null_model, int n, int reps,
                      double alpha, std::uint64_t seed,
                      const TestConfig& base = {}, double zeta_min = 1e-3,
                      int jobs = 1);

}  // namespace wci
