#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace wci {

/// Grid-cell label of one observation.
struct CellLabel {
  int i = 0;
  int j = 0;
  friend bool operator==(const CellLabel&, const CellLabel&) = default;
};

/// One Z-bin's observations mapped to their level-k cell labels.
using CellSample = std::vector<CellLabel>;

/// Joint/marginal counts of a cell sample.
struct CellTable {
  std::vector<std::pair<std::uint64_t, double>> counts;  // packed (i,j) -> count, sorted
  std::vector<std::pair<int, double>> row_counts;        // i -> count, sorted by i
  std::vector<std::pair<int, double>> col_counts;        // j -> count, sorted by j
  double total = 0;

  static CellTable from_labels(const CellSample& cells);
};

/// Kernel atom: 1(obs_i == cell) - 1(obs_i.x == cell.x) * 1(obs_j.y == cell.y).
/// Takes values in {-1, 0, +1}.
int phi(const CellLabel& obs_i, const CellLabel& obs_j, const CellLabel& cell);

/// Exact U-statistic over all 4-subsets and all 4! orderings of each subset;
/// O(sigma^4) reference evaluation. Requires sigma >= 4.
double u_naive(const CellSample& cells);

/// Count-statistics evaluation of the same U-statistic in O(sigma) time.
/// Identical to u_naive within 1e-10 on every input.
double u_fast(const CellSample& cells);
double u_fast(const CellTable& table);

/// Closed-form conditional expectation sum_ij (q_ij - q_i. * q_.j)^2 for a
/// probability table (rows x cols, entries sum to 1 within 1e-9).
double u_expectation(const Eigen::MatrixXd& q);

}  // namespace wci
