#include "wci/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "wci/rng.hpp"

namespace wci {

namespace {

int ceil_log2(int d) {
  int k = 0;
  while ((1 << k) < d) ++k;
  return k;
}

}  // namespace

int AxisPartition::index_of(double x) const {
  const int L = count;
  if (x >= bounds[static_cast<std::size_t>(L - 1)]) return L;
  if (x < bounds[1]) return 1;
  const double scale = std::ldexp(1.0, level);
  int i = 2 + static_cast<int>(std::floor((x - offset) * scale));
  i = std::clamp(i, 2, L - 1);
  // Repair possible one-off from rounding so the stored bounds agree.
  while (i > 1 && x < bounds[static_cast<std::size_t>(i - 1)]) --i;
  while (i < L && x >= bounds[static_cast<std::size_t>(i)]) ++i;
  return i;
}

AxisPartition axis_partition(double eta, int level) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("axis_partition: eta outside [0,1]");
  if (level < 0) throw std::invalid_argument("axis_partition: negative level");
  const double scale = std::ldexp(1.0, level);   // 2^k
  const double inv = std::ldexp(1.0, -level);    // 2^-k
  const int lead = static_cast<int>(std::floor(scale * eta));
  const int trail = static_cast<int>(std::floor(scale * (1.0 - eta)));
  AxisPartition part;
  part.level = level;
  part.anchor = eta;
  part.offset = eta - lead * inv;
  part.count = 2 + lead + trail;
  part.bounds.resize(static_cast<std::size_t>(part.count) + 1);
  part.bounds.front() = 0.0;
  for (int i = 1; i < part.count; ++i)
    part.bounds[static_cast<std::size_t>(i)] = part.offset + (i - 1) * inv;
  part.bounds.back() = 1.0;
  return part;
}

std::pair<int, int> GridSystem::cell_index(int k, double x, double y) const {
  if (k < min_level || k > max_level)
    throw std::invalid_argument("cell_index: level out of range");
  return {x_at(k).index_of(x), y_at(k).index_of(y)};
}

GridSystem build_grid_levels(const Eigen::Vector2d& eta, int kmin, int kmax) {
  if (!(eta[0] >= 0.0 && eta[0] <= 1.0 && eta[1] >= 0.0 && eta[1] <= 1.0))
    throw std::invalid_argument("build_grid: eta outside [0,1]^2");
  GridSystem g;
  g.eta = eta;
  g.min_level = kmin;
  g.max_level = kmax;
  for (int k = kmin; k <= kmax; ++k) {
    g.x_axis.push_back(axis_partition(eta[0], k));
    g.y_axis.push_back(axis_partition(eta[1], k));
  }
  return g;
}

GridSystem build_grid(const Eigen::Vector2d& eta, int d) {
  if (d < 1) throw std::invalid_argument("build_grid: d must be positive");
  return build_grid_levels(eta, 1, ceil_log2(d));
}

EtaGrid eta_grid(int d) {
  if (d < 1) throw std::invalid_argument("eta_grid: d must be positive");
  const int K = ceil_log2(d);
  EtaGrid grid;
  grid.per_axis = (1 << (K + 1)) + 1;
  grid.spacing = std::ldexp(1.0, -(K + 1));
  grid.points.reserve(static_cast<std::size_t>(grid.per_axis) * grid.per_axis);
  for (int i = 0; i < grid.per_axis; ++i)
    for (int j = 0; j < grid.per_axis; ++j)
      grid.points.emplace_back(std::min(i * grid.spacing, 1.0),
                               std::min(j * grid.spacing, 1.0));
  return grid;
}

namespace {

// Accumulate the signed cell-mass difference of p and q on one grid level.
// Works for dim 1 (j label fixed at 0) and dim 2.
double level_l1(const DiscreteMeasure& p, const DiscreteMeasure& q,
                const AxisPartition& px, const AxisPartition* py) {
  std::unordered_map<std::uint64_t, double> diff;
  diff.reserve(static_cast<std::size_t>(p.size() + q.size()));
  auto add = [&](const DiscreteMeasure& m, double sign) {
    for (Eigen::Index r = 0; r < m.size(); ++r) {
      const std::uint64_t i = static_cast<std::uint64_t>(px.index_of(m.support(r, 0)));
      const std::uint64_t j =
          py ? static_cast<std::uint64_t>(py->index_of(m.support(r, 1))) : 0;
      diff[(i << 32) | j] += sign * m.weights[r];
    }
  };
  add(p, 1.0);
  add(q, -1.0);
  double sum = 0.0;
  for (const auto& [key, v] : diff) sum += std::abs(v);
  return sum;
}

}  // namespace

double multires_l1(const DiscreteMeasure& p, const DiscreteMeasure& q,
                   const GridSystem& g, int k) {
  if (p.dim != 2 || q.dim != 2)
    throw std::invalid_argument("multires_l1: dim-2 measures required");
  if (k < g.min_level || k > g.max_level)
    throw std::invalid_argument("multires_l1: level out of range");
  return level_l1(p, q, g.x_at(k), &g.y_at(k));
}

double weed_bach_bound(const DiscreteMeasure& p, const DiscreteMeasure& q,
                       const Eigen::Vector2d& eta, int d) {
  const int K = ceil_log2(d);
  const GridSystem g = build_grid(eta, d);
  double sum = std::ldexp(1.0, -2 * K);
  for (int k = 1; k <= K; ++k)
    sum += std::ldexp(1.0, -2 * (k - 1)) * multires_l1(p, q, g, k);
  return 2.0 * sum;
}

double indyk_thaper_sum(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        double phi, int q_dim, int subsample,
                        std::uint64_t seed) {
  if (mu.dim != q_dim || nu.dim != q_dim)
    throw std::invalid_argument("indyk_thaper_sum: dimension mismatch");
  if (!(phi > 0.0 && phi <= 1.0))
    throw std::invalid_argument("indyk_thaper_sum: phi must be in (0,1]");
  const int K = ceil_log2(static_cast<int>(std::ceil(1.0 / phi)));
  const double spacing = std::ldexp(1.0, -(K + 1));
  const int per_axis = (1 << (K + 1)) + 1;

  std::vector<Eigen::Vector2d> etas;
  if (subsample > 0) {
    Rng rng = make_rng(seed);
    etas.reserve(static_cast<std::size_t>(subsample));
    std::uniform_int_distribution<int> pick(0, per_axis - 1);
    for (int s = 0; s < subsample; ++s) {
      const double e1 = std::min(pick(rng) * spacing, 1.0);
      const double e2 = q_dim == 2 ? std::min(pick(rng) * spacing, 1.0) : 0.0;
      etas.emplace_back(e1, e2);
    }
  } else {
    if (q_dim == 1) {
      for (int i = 0; i < per_axis; ++i)
        etas.emplace_back(std::min(i * spacing, 1.0), 0.0);
    } else {
      for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j)
          etas.emplace_back(std::min(i * spacing, 1.0), std::min(j * spacing, 1.0));
    }
  }

  double total = 0.0;
  for (const Eigen::Vector2d& eta : etas) {
    double inner = 0.0;
    for (int k = 0; k <= K; ++k) {
      const AxisPartition px = axis_partition(eta[0], k);
      if (q_dim == 1) {
        inner += std::ldexp(1.0, -k) * level_l1(mu, nu, px, nullptr);
      } else {
        const AxisPartition py = axis_partition(eta[1], k);
        inner += std::ldexp(1.0, -k) * level_l1(mu, nu, px, &py);
      }
    }
    total += inner;
  }
  return total / static_cast<double>(etas.size());
}

}  // namespace wci
