#include "wci/citest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wci/ustat.hpp"

namespace wci {

namespace {

int ceil_log2(int d) {
  int k = 0;
  while ((1 << k) < d) ++k;
  return k;
}

}  // namespace

int default_bin_count(int n) {
  if (n < 1) throw std::invalid_argument("default_bin_count: n must be positive");
  // ceil(n^{2/5}) without trusting pow at integer boundaries: smallest d
  // with d^5 >= n^2.
  int d = static_cast<int>(std::floor(std::pow(static_cast<double>(n), 0.4))) - 1;
  if (d < 1) d = 1;
  const auto pow5 = [](long long v) { return v * v * v * v * v; };
  const long long n2 = static_cast<long long>(n) * n;
  while (pow5(d) < n2) ++d;
  return d;
}

double threshold_tau(double zeta, int d) {
  const double l = std::log2(static_cast<double>(d));
  return zeta * std::sqrt(static_cast<double>(d)) * l * l;
}

int TestConfig::resolved_bins() const { return d > 0 ? d : default_bin_count(n); }

void TestConfig::validate() const {
  if (n < 6)
    throw std::invalid_argument("TestConfig: n must be at least 6 (so d >= 2)");
  if (resolved_bins() < 2)
    throw std::invalid_argument("TestConfig: d must be at least 2");
  if (!(zeta > 0)) throw std::invalid_argument("TestConfig: zeta must be positive");
  if (eta_subsample < 0)
    throw std::invalid_argument("TestConfig: eta_subsample must be >= 0");
}

int poissonize(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("poissonize: n must be positive");
  return poisson_draw(n / 2.0, rng);
}

int bin_index_z(double z, int d) {
  const int m = static_cast<int>(z * d);
  return 1 + std::min(m, d - 1);
}

int BinnedDataset::total() const {
  int t = 0;
  for (int c : counts) t += c;
  return t;
}

BinnedDataset bin_by_z(const Dataset& data, int d) {
  if (d < 1) throw std::invalid_argument("bin_by_z: d must be positive");
  BinnedDataset out;
  out.d = d;
  out.bins.resize(static_cast<std::size_t>(d));
  out.counts.assign(static_cast<std::size_t>(d), 0);
  for (const Sample& s : data.samples) {
    const int m = bin_index_z(s.z, d);
    out.bins[static_cast<std::size_t>(m - 1)].emplace_back(s.x, s.y);
    ++out.counts[static_cast<std::size_t>(m - 1)];
  }
  return out;
}

namespace {

// Interval label at level k for cut offset `o` (a multiple of 2^-(K+1)):
// 0 for the leading stub [0, o), then 1 + floor((x - o) 2^k). For dyadic
// offsets this reproduces the axis partition exactly; only the partition of
// points into common labels matters to the U-statistic, not label values.
inline int axis_label(double x, double offset, double scale) {
  if (x < offset) return 0;
  return 1 + static_cast<int>((x - offset) * scale);
}

struct BinPoints {
  std::vector<double> x, y;
};

// One eta-average pass, either over explicit eta points (subsample) or over
// per-level offset classes (exact enumeration). Contributions are written
// into a depth x d accumulator of E_eta[4^-k U sigma 1(sigma>=4)].
class StatAccumulator {
 public:
  StatAccumulator(const std::vector<BinPoints>& bins, int depth)
      : bins_(bins),
        table_(Eigen::MatrixXd::Zero(depth, static_cast<Eigen::Index>(bins.size()))) {}

  // Add one (level, x-offset, y-offset) evaluation with the given weight.
  void add(int k, double ox, double oy, double weight) {
    const double scale = std::ldexp(1.0, k);
    const double w = weight * std::ldexp(1.0, -2 * k);
    for (std::size_t m = 0; m < bins_.size(); ++m) {
      const BinPoints& bin = bins_[m];
      const int sigma = static_cast<int>(bin.x.size());
      if (sigma < 4) continue;
      labels_.clear();
      labels_.reserve(static_cast<std::size_t>(sigma));
      for (int t = 0; t < sigma; ++t)
        labels_.push_back({axis_label(bin.x[static_cast<std::size_t>(t)], ox, scale),
                           axis_label(bin.y[static_cast<std::size_t>(t)], oy, scale)});
      table_(k - 1, static_cast<Eigen::Index>(m)) += w * u_fast(labels_) * sigma;
    }
  }

  const Eigen::MatrixXd& table() const { return table_; }

 private:
  const std::vector<BinPoints>& bins_;
  Eigen::MatrixXd table_;
  CellSample labels_;
};

}  // namespace

TestReport statistic_T(const Dataset& data, const TestConfig& cfg) {
  cfg.validate();
  if (data.samples.empty())
    throw std::invalid_argument("statistic_T: empty dataset");

  const int d = cfg.resolved_bins();
  const int depth = ceil_log2(d);
  const BinnedDataset binned = bin_by_z(data, d);
  std::vector<BinPoints> bins(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m) {
    for (const Eigen::Vector2d& p : binned.bins[static_cast<std::size_t>(m)]) {
      bins[static_cast<std::size_t>(m)].x.push_back(p[0]);
      bins[static_cast<std::size_t>(m)].y.push_back(p[1]);
    }
  }

  StatAccumulator acc(bins, depth);
  const int per_axis = (1 << (depth + 1)) + 1;  // eta grid points per axis
  const double spacing = std::ldexp(1.0, -(depth + 1));
  long eta_count = 0;

  if (cfg.eta_subsample > 0) {
    Rng rng = make_rng(derive_seed(cfg.rng_seed, "eta-subsample"));
    std::uniform_int_distribution<int> pick(0, per_axis - 1);
    const double w = 1.0 / cfg.eta_subsample;
    for (int s = 0; s < cfg.eta_subsample; ++s) {
      const double e1 = std::min(pick(rng) * spacing, 1.0);
      const double e2 = std::min(pick(rng) * spacing, 1.0);
      for (int k = 1; k <= depth; ++k) {
        const double cell = std::ldexp(1.0, -k);
        acc.add(k, std::fmod(e1, cell), std::fmod(e2, cell), w);
      }
    }
    eta_count = cfg.eta_subsample;
  } else {
    // Exact enumeration: at level k the partition depends on eta only through
    // eta mod 2^-k, so the (2^{K+1}+1)^2 eta points collapse into offset
    // classes with integer multiplicities.
    const double total = static_cast<double>(per_axis) * per_axis;
    for (int k = 1; k <= depth; ++k) {
      const int classes = 1 << (depth + 1 - k);  // offsets j*spacing
      for (int jx = 0; jx < classes; ++jx) {
        const double mx = (1 << k) + (jx == 0 ? 1 : 0);
        for (int jy = 0; jy < classes; ++jy) {
          const double my = (1 << k) + (jy == 0 ? 1 : 0);
          acc.add(k, jx * spacing, jy * spacing, mx * my / total);
        }
      }
    }
    eta_count = static_cast<long>(per_axis) * per_axis;
  }

  TestReport report;
  report.n = cfg.n;
  report.N = static_cast<int>(data.samples.size());
  report.d = d;
  report.depth = depth;
  report.zeta = cfg.zeta;
  report.per_level_per_bin = acc.table();
  report.T = acc.table().sum();
  report.tau = threshold_tau(cfg.zeta, d);
  report.eta_count = eta_count;
  report.eta_approximate = cfg.eta_subsample > 0;
  return report;
}

TestReport run_test(const Dataset& data, const TestConfig& cfg, Rng& rng) {
  cfg.validate();
  if (static_cast<int>(data.samples.size()) < cfg.n)
    throw std::invalid_argument("run_test: dataset has fewer than n samples");
  const int N = cfg.poissonize ? poissonize(cfg.n, rng) : cfg.n;

  if (N > cfg.n || N == 0) {
    // Overflow accepts outright; an empty draw has no statistic to compute.
    TestReport report;
    report.n = cfg.n;
    report.N = N;
    report.accepted_by_overflow = N > cfg.n;
    report.d = cfg.resolved_bins();
    report.depth = ceil_log2(report.d);
    report.zeta = cfg.zeta;
    report.tau = threshold_tau(cfg.zeta, report.d);
    report.per_level_per_bin = Eigen::MatrixXd::Zero(report.depth, report.d);
    report.reject = false;
    return report;
  }

  Dataset prefix;
  prefix.samples.assign(data.samples.begin(), data.samples.begin() + N);
  TestReport report = statistic_T(prefix, cfg);
  report.n = cfg.n;
  report.N = N;
  report.reject = report.T >= report.tau;
  return report;
}

TestReport run_test(const Dataset& data, const TestConfig& cfg) {
  Rng rng = make_rng(cfg.rng_seed);
  return run_test(data, cfg, rng);
}

}  // namespace wci
