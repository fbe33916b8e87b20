#include "wci/ot.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wci {

namespace {

constexpr double kDualTol = 1e-11;   // reduced-cost optimality threshold
constexpr double kCertTol = 1e-9;    // feasibility certificate tolerance

struct BasisArc {
  int row;
  int col;
  double mass;
};

// Tree structure over rows (0..m-1) and cols (m..m+n-1) induced by the basis.
std::vector<std::vector<std::pair<int, int>>> basis_adjacency(
    const std::vector<BasisArc>& basis, int m, int n) {
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(m + n));
  for (int a = 0; a < static_cast<int>(basis.size()); ++a) {
    const int r = basis[static_cast<std::size_t>(a)].row;
    const int c = m + basis[static_cast<std::size_t>(a)].col;
    adj[static_cast<std::size_t>(r)].push_back({c, a});
    adj[static_cast<std::size_t>(c)].push_back({r, a});
  }
  return adj;
}

// Solve u_i + v_j = c_ij over the basis tree, rooted at row 0 with u_0 = 0.
void compute_duals(const std::vector<BasisArc>& basis, const Eigen::MatrixXd& cost,
                   int m, int n, Eigen::VectorXd& u, Eigen::VectorXd& v) {
  const auto adj = basis_adjacency(basis, m, n);
  std::vector<char> seen(static_cast<std::size_t>(m + n), 0);
  std::deque<int> queue;
  u.setZero(m);
  v.setZero(n);
  seen[0] = 1;
  queue.push_back(0);
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    for (auto [next, a] : adj[static_cast<std::size_t>(node)]) {
      if (seen[static_cast<std::size_t>(next)]) continue;
      seen[static_cast<std::size_t>(next)] = 1;
      const BasisArc& arc = basis[static_cast<std::size_t>(a)];
      if (next >= m)
        v[arc.col] = cost(arc.row, arc.col) - u[arc.row];
      else
        u[arc.row] = cost(arc.row, arc.col) - v[arc.col];
      queue.push_back(next);
    }
  }
}

// Unique tree path from row `i` to col node `m + j`; returns basis arc indices.
std::vector<int> tree_path(const std::vector<BasisArc>& basis, int m, int n,
                           int i, int j) {
  const auto adj = basis_adjacency(basis, m, n);
  std::vector<int> parent_node(static_cast<std::size_t>(m + n), -1);
  std::vector<int> parent_arc(static_cast<std::size_t>(m + n), -1);
  std::vector<char> seen(static_cast<std::size_t>(m + n), 0);
  std::deque<int> queue;
  seen[static_cast<std::size_t>(i)] = 1;
  queue.push_back(i);
  const int target = m + j;
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    if (node == target) break;
    for (auto [next, a] : adj[static_cast<std::size_t>(node)]) {
      if (seen[static_cast<std::size_t>(next)]) continue;
      seen[static_cast<std::size_t>(next)] = 1;
      parent_node[static_cast<std::size_t>(next)] = node;
      parent_arc[static_cast<std::size_t>(next)] = a;
      queue.push_back(next);
    }
  }
  std::vector<int> path;
  for (int node = target; node != i; node = parent_node[static_cast<std::size_t>(node)]) {
    path.push_back(parent_arc[static_cast<std::size_t>(node)]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

double transport_lp(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                    const Eigen::MatrixXd& cost, Eigen::MatrixXd* plan) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (cost.rows() != m || cost.cols() != n)
    throw std::invalid_argument("transport_lp: cost shape mismatch");
  if (m == 0 || n == 0) throw std::invalid_argument("transport_lp: empty side");
  if (std::abs(supply.sum() - demand.sum()) > 1e-9)
    throw std::invalid_argument("transport_lp: unbalanced supply/demand");

  // Northwest-corner start: exactly m+n-1 basic arcs, degenerate ones kept.
  std::vector<BasisArc> basis;
  basis.reserve(static_cast<std::size_t>(m + n - 1));
  {
    Eigen::VectorXd a = supply, b = demand;
    int i = 0, j = 0;
    while (true) {
      const double move = std::min(a[i], b[j]);
      basis.push_back({i, j, move});
      a[i] -= move;
      b[j] -= move;
      if (i == m - 1 && j == n - 1) break;
      // Exactly one index advances per step, so the walk always emits
      // m+n-1 arcs (ties and float residues only make some of them
      // degenerate).
      if (i == m - 1) ++j;
      else if (j == n - 1) ++i;
      else if (a[i] <= 0.0) ++i;
      else ++j;
    }
  }
  if (static_cast<int>(basis.size()) != m + n - 1)
    throw std::runtime_error("transport_lp: degenerate start basis");

  Eigen::VectorXd u(m), v(n);
  const long max_iter = 2000L * (m + n) * (m + n);
  const long bland_after = 200L * (m + n) * (m + n);
  for (long iter = 0;; ++iter) {
    if (iter > max_iter) throw std::runtime_error("transport_lp: iteration cap hit");
    compute_duals(basis, cost, m, n, u, v);

    // Entering arc: most negative reduced cost (Bland's rule after a while).
    int ei = -1, ej = -1;
    double best = -kDualTol;
    const bool bland = iter > bland_after;
    for (int i = 0; i < m && !(bland && ei >= 0); ++i) {
      for (int j = 0; j < n; ++j) {
        const double rc = cost(i, j) - u[i] - v[j];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          if (bland) break;
        }
      }
    }
    if (ei < 0) break;  // dual feasible: optimal

    // Pivot around the unique cycle formed by the entering arc.
    const std::vector<int> path = tree_path(basis, m, n, ei, ej);
    // Path alternates col<-...<-row starting at row ei; arcs at even positions
    // (0-based) lose mass when the entering arc gains it. Leaving arc:
    // smallest such mass, ties to the smallest basis index.
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t s = 0; s < path.size(); s += 2) {
      const double mass = basis[static_cast<std::size_t>(path[s])].mass;
      if (mass < theta || (mass == theta && path[s] < leave)) {
        theta = mass;
        leave = path[s];
      }
    }
    for (std::size_t s = 0; s < path.size(); ++s) {
      BasisArc& arc = basis[static_cast<std::size_t>(path[s])];
      arc.mass += (s % 2 == 0) ? -theta : theta;
      if (arc.mass < 0) arc.mass = 0;
    }
    basis[static_cast<std::size_t>(leave)] = {ei, ej, theta};
  }

  // Certificates: primal feasibility and complementary slackness.
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, n);
  for (const BasisArc& arc : basis) flow(arc.row, arc.col) += arc.mass;
  if (((flow.rowwise().sum() - supply).cwiseAbs().maxCoeff() > kCertTol) ||
      ((flow.colwise().sum().transpose() - demand).cwiseAbs().maxCoeff() > kCertTol))
    throw std::runtime_error("transport_lp: primal certificate failed");
  compute_duals(basis, cost, m, n, u, v);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (cost(i, j) - u[i] - v[j] < -kCertTol)
        throw std::runtime_error("transport_lp: dual certificate failed");

  if (plan) *plan = flow;
  return (flow.array() * cost.array()).sum();
}

namespace {

Eigen::MatrixXd pairwise_cost(const DiscreteMeasure& p, const DiscreteMeasure& q,
                              int order) {
  Eigen::MatrixXd cost(p.size(), q.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      const double d2 = (p.support.row(i) - q.support.row(j)).squaredNorm();
      cost(i, j) = order == 2 ? d2 : std::sqrt(d2);
    }
  }
  return cost;
}

}  // namespace

OtResult wasserstein(const DiscreteMeasure& p, const DiscreteMeasure& q,
                     int order, Eigen::Index support_cap) {
  if (p.dim != q.dim) throw std::invalid_argument("wasserstein: dimension mismatch");
  if (order != 1 && order != 2)
    throw std::invalid_argument("wasserstein: order must be 1 or 2");
  if (p.size() > support_cap || q.size() > support_cap)
    throw std::invalid_argument("wasserstein: support cap exceeded");

  const Eigen::MatrixXd cost = pairwise_cost(p, q, order);
  OtResult res;
  res.order = order;
  const double obj = transport_lp(p.weights, q.weights, cost, &res.coupling.mass);
  res.value = order == 2 ? std::sqrt(std::max(obj, 0.0)) : obj;
  return res;
}

double wasserstein_1d(const DiscreteMeasure& p, const DiscreteMeasure& q,
                      int order) {
  if (p.dim != 1 || q.dim != 1)
    throw std::invalid_argument("wasserstein_1d: inputs must be 1-D");
  if (order != 1 && order != 2)
    throw std::invalid_argument("wasserstein_1d: order must be 1 or 2");
  // Supports are sorted on construction, so the quantile coupling is a
  // two-pointer sweep matching mass in increasing order.
  Eigen::Index i = 0, j = 0;
  double a = p.weights[0], b = q.weights[0];
  double total = 0.0;
  while (true) {
    const double move = std::min(a, b);
    const double d = std::abs(p.support(i, 0) - q.support(j, 0));
    total += move * (order == 2 ? d * d : d);
    a -= move;
    b -= move;
    if (a <= 0.0) {
      if (++i == p.size()) break;
      a = p.weights[i];
    }
    if (b <= 0.0) {
      if (++j == q.size()) break;
      b = q.weights[j];
    }
  }
  return order == 2 ? std::sqrt(std::max(total, 0.0)) : total;
}

}  // namespace wci
