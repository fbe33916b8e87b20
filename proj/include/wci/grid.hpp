#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "wci/measure.hpp"

namespace wci {

/// Level-k interval system on [0,1] for one axis, anchored at `eta`.
///
/// There are L = 2 + floor(2^k eta) + floor(2^k (1-eta)) intervals: a
/// (possibly empty) leading stub [0, offset), full dyadic intervals of
/// length exactly 2^-k, and a trailing interval closed at 1. All intervals
/// are left-closed right-open except the last. Empty intervals are retained
/// with their index so L always matches the formula.
struct AxisPartition {
  int level = 0;               // k
  double anchor = 0;           // eta coordinate
  double offset = 0;           // eta - floor(2^k eta)/2^k, in [0, 2^-k)
  int count = 0;               // L
  std::vector<double> bounds;  // size L+1: 0, offset, offset+2^-k, ..., 1

  /// 1-based interval index of x in [0,1]; the returned interval always
  /// contains x with respect to `bounds` (last interval closed at 1).
  int index_of(double x) const;
};

AxisPartition axis_partition(double eta, int level);

/// The multiresolution grid collection: levels kmin..kmax of axis
/// partitions for both coordinates, anchored at a common eta.
struct GridSystem {
  Eigen::Vector2d eta{0, 0};
  int min_level = 1;
  int max_level = 0;  // depth K
  std::vector<AxisPartition> x_axis;  // index 0 holds level `min_level`
  std::vector<AxisPartition> y_axis;

  const AxisPartition& x_at(int k) const { return x_axis[static_cast<std::size_t>(k - min_level)]; }
  const AxisPartition& y_at(int k) const { return y_axis[static_cast<std::size_t>(k - min_level)]; }

  /// Cell label (i, j), 1-based per axis, of a point at level k.
  std::pair<int, int> cell_index(int k, double x, double y) const;
};

/// Grids at levels 1..ceil(log2 d), as used by the test statistic.
GridSystem build_grid(const Eigen::Vector2d& eta, int d);

/// Grids over an explicit level range (level 0 splits [0,1] at eta).
GridSystem build_grid_levels(const Eigen::Vector2d& eta, int kmin, int kmax);

/// The eta enumeration grid: spacing 2^-(ceil(log2 d)+1), all points
/// (i*s, j*s) in [0,1]^2.
struct EtaGrid {
  double spacing = 0;
  int per_axis = 0;  // points per coordinate = 1/spacing + 1
  std::vector<Eigen::Vector2d> points;
};

EtaGrid eta_grid(int d);

/// Sum over level-k cells of |p(cell) - q(cell)|; in [0, 2].
double multires_l1(const DiscreteMeasure& p, const DiscreteMeasure& q,
                   const GridSystem& g, int k);

/// Fully explicit multiresolution upper bound for W_2^2(p,q):
///   2 * [ 4^-K + sum_{k=1..K} 4^-(k-1) * multires_l1(p,q,k) ],  K = ceil(log2 d).
double weed_bach_bound(const DiscreteMeasure& p, const DiscreteMeasure& q,
                       const Eigen::Vector2d& eta, int d);

/// Eta-averaged multiresolution L1 sum at levels 0..ceil(log2(1/phi)) with
/// weights 2^-k, for measures on [0,1]^q_dim. Exact enumeration over the
/// eta grid by default; `subsample` > 0 draws that many eta points instead
/// (seeded), trading exactness for speed.
double indyk_thaper_sum(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        double phi, int q_dim, int subsample = 0,
                        std::uint64_t seed = 0);

}  // namespace wci
