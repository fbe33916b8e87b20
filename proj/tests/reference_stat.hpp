#pragma once

// Slow reference evaluation of the multiresolution statistic: enumerate the
// full eta grid literally, build the interval-list grid system per eta, and
// evaluate the per-bin U-statistic by the requested path. Kept independent
// of the offset-class production path it checks.

#include <cmath>

#include "wci/citest.hpp"
#include "wci/grid.hpp"
#include "wci/ustat.hpp"

namespace wci_test {

inline double statistic_reference(const wci::Dataset& data, int d, bool use_naive) {
  const wci::BinnedDataset binned = wci::bin_by_z(data, d);
  int depth = 0;
  while ((1 << depth) < d) ++depth;
  const wci::EtaGrid etas = wci::eta_grid(d);
  double total = 0.0;
  for (const Eigen::Vector2d& eta : etas.points) {
    const wci::GridSystem grid = wci::build_grid(eta, d);
    double value = 0.0;
    for (int k = 1; k <= depth; ++k) {
      for (int m = 0; m < d; ++m) {
        const auto& bin = binned.bins[static_cast<std::size_t>(m)];
        const int sigma = static_cast<int>(bin.size());
        if (sigma < 4) continue;
        wci::CellSample labels;
        labels.reserve(bin.size());
        for (const Eigen::Vector2d& p : bin) {
          const auto [i, j] = grid.cell_index(k, p[0], p[1]);
          labels.push_back({i, j});
        }
        const double u = use_naive ? wci::u_naive(labels) : wci::u_fast(labels);
        value += std::ldexp(1.0, -2 * k) * u * sigma;
      }
    }
    total += value;
  }
  return total / static_cast<double>(etas.points.size());
}

}  // namespace wci_test
