#include "wci/ustat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace wci {

int phi(const CellLabel& obs_i, const CellLabel& obs_j, const CellLabel& cell) {
  const int joint = (obs_i.i == cell.i && obs_i.j == cell.j) ? 1 : 0;
  const int split = (obs_i.i == cell.i && obs_j.j == cell.j) ? 1 : 0;
  return joint - split;
}

namespace {

// Summing the phi-product over the full cell range reduces to the distinct
// labels present among the four chosen observations: phi vanishes elsewhere.
double kernel_h(const std::array<CellLabel, 4>& obs) {
  std::array<int, 4> xs{}, ys{};
  int nx = 0, ny = 0;
  for (const CellLabel& o : obs) {
    if (std::find(xs.begin(), xs.begin() + nx, o.i) == xs.begin() + nx) xs[static_cast<std::size_t>(nx++)] = o.i;
    if (std::find(ys.begin(), ys.begin() + ny, o.j) == ys.begin() + ny) ys[static_cast<std::size_t>(ny++)] = o.j;
  }
  static constexpr int kPerm[24][4] = {
      {0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3}, {0, 2, 3, 1}, {0, 3, 1, 2},
      {0, 3, 2, 1}, {1, 0, 2, 3}, {1, 0, 3, 2}, {1, 2, 0, 3}, {1, 2, 3, 0},
      {1, 3, 0, 2}, {1, 3, 2, 0}, {2, 0, 1, 3}, {2, 0, 3, 1}, {2, 1, 0, 3},
      {2, 1, 3, 0}, {2, 3, 0, 1}, {2, 3, 1, 0}, {3, 0, 1, 2}, {3, 0, 2, 1},
      {3, 1, 0, 2}, {3, 1, 2, 0}, {3, 2, 0, 1}, {3, 2, 1, 0}};
  double sum = 0.0;
  for (const auto& perm : kPerm) {
    for (int a = 0; a < nx; ++a) {
      for (int b = 0; b < ny; ++b) {
        const CellLabel cell{xs[static_cast<std::size_t>(a)], ys[static_cast<std::size_t>(b)]};
        sum += phi(obs[static_cast<std::size_t>(perm[0])], obs[static_cast<std::size_t>(perm[1])], cell) *
               phi(obs[static_cast<std::size_t>(perm[2])], obs[static_cast<std::size_t>(perm[3])], cell);
      }
    }
  }
  return sum / 24.0;
}

}  // namespace

double u_naive(const CellSample& cells) {
  const int sigma = static_cast<int>(cells.size());
  if (sigma < 4) throw std::invalid_argument("u_naive: need sigma >= 4");
  double sum = 0.0;
  for (int a = 0; a < sigma; ++a)
    for (int b = a + 1; b < sigma; ++b)
      for (int c = b + 1; c < sigma; ++c)
        for (int e = c + 1; e < sigma; ++e)
          sum += kernel_h({cells[static_cast<std::size_t>(a)], cells[static_cast<std::size_t>(b)],
                           cells[static_cast<std::size_t>(c)], cells[static_cast<std::size_t>(e)]});
  const double quadruples = static_cast<double>(sigma) * (sigma - 1) * (sigma - 2) * (sigma - 3) / 24.0;
  return sum / quadruples;
}

CellTable CellTable::from_labels(const CellSample& cells) {
  CellTable t;
  std::vector<std::uint64_t> packed;
  packed.reserve(cells.size());
  for (const CellLabel& c : cells)
    packed.push_back((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.i)) << 32) |
                     static_cast<std::uint32_t>(c.j));
  std::sort(packed.begin(), packed.end());
  for (std::size_t s = 0; s < packed.size();) {
    std::size_t e = s;
    while (e < packed.size() && packed[e] == packed[s]) ++e;
    t.counts.emplace_back(packed[s], static_cast<double>(e - s));
    s = e;
  }
  auto accumulate = [](std::vector<std::pair<int, double>>& out, int label, double cnt) {
    auto it = std::lower_bound(out.begin(), out.end(), label,
                               [](const auto& p, int l) { return p.first < l; });
    if (it != out.end() && it->first == label) it->second += cnt;
    else out.insert(it, {label, cnt});
  };
  for (const auto& [key, cnt] : t.counts) {
    accumulate(t.row_counts, static_cast<int>(key >> 32), cnt);
    accumulate(t.col_counts, static_cast<int>(key & 0xffffffffu), cnt);
  }
  t.total = static_cast<double>(cells.size());
  return t;
}

double u_fast(const CellTable& t) {
  const double sigma = t.total;
  if (sigma < 4) throw std::invalid_argument("u_fast: need sigma >= 4");

  // Count-monomial expansion of the kernel average over ordered distinct
  // 4-tuples. Cell-local sums run over occupied cells; the rest separates
  // into row/column moments.
  auto marginal = [](const std::vector<std::pair<int, double>>& m, int label) {
    auto it = std::lower_bound(m.begin(), m.end(), label,
                               [](const auto& p, int l) { return p.first < l; });
    return it->second;
  };
  double p2 = 0;    // sum n_xy^2
  double quad = 0;  // sum n_xy * n_x. * n_.y
  double rx = 0;    // sum n_xy * n_.y
  double ry = 0;    // sum n_xy * n_x.
  for (const auto& [key, cnt] : t.counts) {
    const double nrow = marginal(t.row_counts, static_cast<int>(key >> 32));
    const double ncol = marginal(t.col_counts, static_cast<int>(key & 0xffffffffu));
    p2 += cnt * cnt;
    quad += cnt * nrow * ncol;
    rx += cnt * ncol;
    ry += cnt * nrow;
  }
  double mx2 = 0, my2 = 0;
  for (const auto& [label, r] : t.row_counts) mx2 += r * r;
  for (const auto& [label, c] : t.col_counts) my2 += c * c;

  const double termA = (sigma - 2) * (sigma - 3) * (p2 - sigma);
  const double termBC = -2.0 * (sigma - 3) * (quad - rx - ry - p2 + 2.0 * sigma);
  const double termD = mx2 * my2 - 4.0 * quad - sigma * my2 - sigma * mx2 +
                       2.0 * p2 + sigma * sigma + 4.0 * rx + 4.0 * ry - 6.0 * sigma;
  const double tuples = sigma * (sigma - 1) * (sigma - 2) * (sigma - 3);
  return (termA + termBC + termD) / tuples;
}

double u_fast(const CellSample& cells) { return u_fast(CellTable::from_labels(cells)); }

double u_expectation(const Eigen::MatrixXd& q) {
  if ((q.array() < -1e-12).any())
    throw std::invalid_argument("u_expectation: negative entry");
  if (std::abs(q.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("u_expectation: table does not sum to 1");
  const Eigen::VectorXd row = q.rowwise().sum();
  const Eigen::RowVectorXd col = q.colwise().sum();
  return (q - row * col).squaredNorm();
}

}  // namespace wci
