#pragma once

#include <Eigen/Core>

#include "wci/measure.hpp"

namespace wci {

/// Transport plan between two discrete measures. Row sums reproduce the
/// source weights and column sums the target weights (within 1e-9).
struct Coupling {
  Eigen::MatrixXd mass;  // rows: p's support, cols: q's support
};

struct OtResult {
  double value = 0;   // W_1 or W_2 (order-2 value is already square-rooted)
  int order = 1;      // 1 or 2
  Coupling coupling;
};

/// Exact Wasserstein distance between small discrete measures via the
/// transportation linear program with cost |x-y|_2 (order 1) or |x-y|_2^2
/// (order 2). The returned coupling is primal feasible and certified
/// optimal through a dual feasibility check on the final basis.
///
/// This is a desk-scale oracle: support sizes beyond `support_cap` per side
/// are rejected.
OtResult wasserstein(const DiscreteMeasure& p, const DiscreteMeasure& q,
                     int order, Eigen::Index support_cap = 64);

/// Closed-form 1-D Wasserstein distance via the quantile coupling.
/// Agrees with wasserstein() within 1e-9 on dim-1 inputs.
double wasserstein_1d(const DiscreteMeasure& p, const DiscreteMeasure& q,
                      int order);

/// Optimal value of the transportation LP for an arbitrary cost matrix.
/// Exposed for the solver's own tests; measures enter via their weights only.
double transport_lp(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                    const Eigen::MatrixXd& cost, Eigen::MatrixXd* plan = nullptr);

}  // namespace wci
