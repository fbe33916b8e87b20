#include "wci/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wci/grid.hpp"
#include "wci/models.hpp"
#include "wci/ot.hpp"
#include "wci/ustat.hpp"

namespace wci {

void VerifyResult::record(bool pass, const std::string& line) {
  lines.push_back((pass ? "PASS " : "FAIL ") + line);
  (pass ? passed : failed) += 1;
}

DiscreteMeasure random_discrete_measure(int dim, int max_support, Rng& rng) {
  std::uniform_int_distribution<int> size_dist(1, max_support);
  const int n = size_dist(rng);
  Eigen::MatrixXd pts(n, dim);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) pts(i, c) = uniform01(rng);
    w[i] = 0.05 + 0.95 * uniform01(rng);
  }
  return make_measure(pts, w);
}

DiscreteMeasure random_corner_measure(Rng& rng) {
  Eigen::MatrixXd pts(4, 2);
  pts << 0, 0, 0, 1, 1, 0, 1, 1;
  Eigen::VectorXd w(4);
  for (int i = 0; i < 4; ++i) w[i] = 0.02 + 0.98 * uniform01(rng);
  return make_measure(pts, w);
}

VerifyResult verify_facts(int trials, std::uint64_t seed) {
  VerifyResult out;
  out.suite = "facts";
  Rng rng = make_rng(seed);
  const double slack = 1e-8;

  int bad = 0;
  for (int t = 0; t < trials; ++t) {
    const DiscreteMeasure p = random_corner_measure(rng);
    const DiscreteMeasure q = random_corner_measure(rng);
    const double w1 = wasserstein(p, q, 1).value;
    const double w2sq = std::pow(wasserstein(p, q, 2).value, 2);
    if (w1 > w2sq + slack || w2sq > std::sqrt(2.0) * w1 + slack) ++bad;
  }
  out.record(bad == 0, "corner-support sandwich W1 <= W2^2 <= sqrt(2) W1 (" +
                           std::to_string(trials - bad) + "/" + std::to_string(trials) + ")");

  bad = 0;
  for (int t = 0; t < trials; ++t) {
    const DiscreteMeasure p = random_discrete_measure(2, 12, rng);
    const DiscreteMeasure q = random_discrete_measure(2, 12, rng);
    if (wasserstein(p, q, 1).value > wasserstein(p, q, 2).value + slack) ++bad;
  }
  out.record(bad == 0, "W1 <= W2 (" + std::to_string(trials - bad) + "/" +
                           std::to_string(trials) + ")");

  bad = 0;
  for (int t = 0; t < trials; ++t) {
    const DiscreteMeasure p = random_discrete_measure(2, 12, rng);
    const DiscreteMeasure q = random_discrete_measure(2, 12, rng);
    const DiscreteMeasure r = random_discrete_measure(2, 12, rng);
    for (int order : {1, 2}) {
      const double pq = wasserstein(p, q, order).value;
      const double qr = wasserstein(q, r, order).value;
      const double rp = wasserstein(r, p, order).value;
      if (pq > qr + rp + slack) ++bad;
    }
  }
  out.record(bad == 0, "triangle inequality for W1 and W2 (" +
                           std::to_string(trials - bad) + "/" + std::to_string(trials) + ")");

  bad = 0;
  for (int t = 0; t < trials; ++t) {
    const DiscreteMeasure p1 = random_discrete_measure(1, 8, rng);
    const DiscreteMeasure p2 = random_discrete_measure(1, 8, rng);
    const DiscreteMeasure q1 = random_discrete_measure(1, 8, rng);
    const DiscreteMeasure q2 = random_discrete_measure(1, 8, rng);
    const double lhs = std::pow(
        wasserstein(product_measure(p1, p2), product_measure(q1, q2), 2).value, 2);
    const double rhs = std::pow(wasserstein(p1, q1, 2).value, 2) +
                       std::pow(wasserstein(p2, q2, 2).value, 2);
    if (lhs > rhs + slack) ++bad;
  }
  out.record(bad == 0, "product subadditivity of W2^2 (" + std::to_string(trials - bad) +
                           "/" + std::to_string(trials) + ")");

  bad = 0;
  for (int t = 0; t < trials; ++t) {
    const DiscreteMeasure p = random_discrete_measure(2, 12, rng);
    const DiscreteMeasure q = random_discrete_measure(2, 12, rng);
    const double w1 = wasserstein(p, q, 1).value;
    const double w2sq = std::pow(wasserstein(p, q, 2).value, 2);
    if (w2sq > std::sqrt(2.0) * w1 + slack) ++bad;
  }
  out.record(bad == 0, "W2^2 <= sqrt(2) W1 (" + std::to_string(trials - bad) + "/" +
                           std::to_string(trials) + ")");
  return out;
}

VerifyResult verify_weedbach(int pairs, std::uint64_t seed) {
  VerifyResult out;
  out.suite = "weedbach";
  Rng rng = make_rng(seed);
  for (int d : {2, 4, 8}) {
    const EtaGrid etas = eta_grid(d);
    int bad = 0;
    long checks = 0;
    for (int t = 0; t < pairs; ++t) {
      const DiscreteMeasure p = random_discrete_measure(2, 12, rng);
      const DiscreteMeasure q = random_discrete_measure(2, 12, rng);
      const double w2sq = std::pow(wasserstein(p, q, 2).value, 2);
      for (const Eigen::Vector2d& eta : etas.points) {
        ++checks;
        if (weed_bach_bound(p, q, eta, d) < w2sq - 1e-10) ++bad;
      }
    }
    std::ostringstream line;
    line << "bound >= exact W2^2, d=" << d << ", all eta (" << (checks - bad) << "/"
         << checks << ")";
    out.record(bad == 0, line.str());
  }
  return out;
}

VerifyResult verify_indykthaper(int pairs, std::uint64_t seed) {
  VerifyResult out;
  out.suite = "indykthaper";
  Rng rng = make_rng(seed);
  for (int q_dim : {1, 2}) {
    for (double phi : {0.5, 0.25, 0.125}) {
      const int levels = static_cast<int>(std::ceil(std::log2(1.0 / phi)));
      int bad = 0;
      for (int t = 0; t < pairs; ++t) {
        const DiscreteMeasure mu = random_discrete_measure(q_dim, q_dim == 1 ? 8 : 12, rng);
        const DiscreteMeasure nu = random_discrete_measure(q_dim, q_dim == 1 ? 8 : 12, rng);
        const double sum = indyk_thaper_sum(mu, nu, phi, q_dim);
        const double w1 = wasserstein(mu, nu, 1).value;
        const double bound = (levels + 1) * 4.0 * q_dim *
                             (w1 / std::sqrt(static_cast<double>(q_dim)) +
                              std::ldexp(1.0, -(levels + 1)));
        if (sum > bound + 1e-8) ++bad;
      }
      std::ostringstream line;
      line << "sum <= (ceil(log2(1/phi))+1) 4q (W1/sqrt(q) + 2^-(K+1)), q=" << q_dim
           << ", phi=" << phi << " (" << (pairs - bad) << "/" << pairs << ")";
      out.record(bad == 0, line.str());
    }
  }
  return out;
}

namespace {

// Expectation of the naive U-statistic at sigma = 4 by exhaustive
// enumeration over all outcome 4-tuples of a finitely supported cell law.
double exhaustive_u_expectation(const std::vector<CellLabel>& cells,
                                const std::vector<double>& probs) {
  const int s = static_cast<int>(cells.size());
  double total = 0.0;
  std::array<int, 4> idx{};
  for (idx[0] = 0; idx[0] < s; ++idx[0])
    for (idx[1] = 0; idx[1] < s; ++idx[1])
      for (idx[2] = 0; idx[2] < s; ++idx[2])
        for (idx[3] = 0; idx[3] < s; ++idx[3]) {
          const CellSample outcome = {cells[static_cast<std::size_t>(idx[0])],
                                      cells[static_cast<std::size_t>(idx[1])],
                                      cells[static_cast<std::size_t>(idx[2])],
                                      cells[static_cast<std::size_t>(idx[3])]};
          const double pr = probs[static_cast<std::size_t>(idx[0])] *
                            probs[static_cast<std::size_t>(idx[1])] *
                            probs[static_cast<std::size_t>(idx[2])] *
                            probs[static_cast<std::size_t>(idx[3])];
          if (pr > 0) total += pr * u_naive(outcome);
        }
  return total;
}

}  // namespace

VerifyResult verify_ustat(int random_instances, std::uint64_t seed) {
  VerifyResult out;
  out.suite = "ustat";
  const std::vector<CellLabel> cells2x2 = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};

  struct Case {
    const char* name;
    std::vector<double> probs;
    Eigen::Matrix2d table;
    double expect;
  };
  std::vector<Case> cases;
  cases.push_back({"diagonal table", {0.5, 0.0, 0.0, 0.5},
                   (Eigen::Matrix2d() << 0.5, 0.0, 0.0, 0.5).finished(), 0.25});
  cases.push_back({"0.35/0.15 table", {0.35, 0.15, 0.15, 0.35},
                   (Eigen::Matrix2d() << 0.35, 0.15, 0.15, 0.35).finished(), 0.04});
  cases.push_back({"product table", {0.15, 0.15, 0.35, 0.35},
                   (Eigen::Matrix2d() << 0.15, 0.15, 0.35, 0.35).finished(), 0.0});

  for (const Case& c : cases) {
    const double enumerated = exhaustive_u_expectation(cells2x2, c.probs);
    const double closed = u_expectation(c.table);
    const bool pass = std::abs(enumerated - closed) < 1e-12 &&
                      std::abs(enumerated - c.expect) < 1e-12;
    std::ostringstream line;
    line << "exhaustive sigma=4 expectation, " << c.name << ": enumerated "
         << enumerated << " vs closed form " << closed;
    out.record(pass, line.str());
  }

  Rng rng = make_rng(seed);
  int bad = 0;
  for (int t = 0; t < random_instances; ++t) {
    std::uniform_int_distribution<int> sigma_dist(4, 12);
    std::uniform_int_distribution<int> range_dist(2, 3);
    const int sigma = sigma_dist(rng);
    const int range = range_dist(rng);
    std::uniform_int_distribution<int> label(1, range);
    CellSample cells;
    for (int i = 0; i < sigma; ++i) cells.push_back({label(rng), label(rng)});
    if (std::abs(u_naive(cells) - u_fast(cells)) > 1e-10) ++bad;
  }
  out.record(bad == 0, "u_fast == u_naive on random instances (" +
                           std::to_string(random_instances - bad) + "/" +
                           std::to_string(random_instances) + ")");
  return out;
}

VerifyResult verify_lowerbound(int mesh, std::uint64_t seed) {
  VerifyResult out;
  out.suite = "lowerbound";
  const BumpBasis basis = [&] {
    // Amplitude 0.2: inside the validity region with visible slack.
    const double theta = 0.2 * 16.0 / bump_h_inf();
    return make_bump_basis(16, theta, seed);
  }();
  const ConditionalModel model = alt_four_corner(basis, 1);

  const bool valid = 0.25 - basis.amplitude() >= 0.0;
  {
    std::ostringstream line;
    line << "validity constraint 1/4 - rho sqrt(d) ||h||_inf = "
         << (0.25 - basis.amplitude()) << " >= 0";
    out.record(valid, line.str());
  }

  int bad_marginal = 0, bad_dual = 0, bad_sandwich = 0, bad_range = 0;
  for (int i = 0; i < mesh; ++i) {
    const double z = (i + 0.5) / mesh;
    const DiscreteMeasure joint = model.conditional_xy(z);
    const DiscreteMeasure mx = model.conditional_x(z);
    const DiscreteMeasure my = model.conditional_y(z);

    // (a) exact marginal uniformity, both from the accessors and the joint.
    double row0 = 0, col0 = 0;
    for (Eigen::Index r = 0; r < joint.size(); ++r) {
      if (joint.support(r, 0) == 0.0) row0 += joint.weights[r];
      if (joint.support(r, 1) == 0.0) col0 += joint.weights[r];
    }
    const bool uniform_x = mx.size() == 2 && mx.weights[0] == 0.5 && mx.weights[1] == 0.5;
    const bool uniform_y = my.size() == 2 && my.weights[0] == 0.5 && my.weights[1] == 0.5;
    if (!(row0 == 0.5 && col0 == 0.5 && uniform_x && uniform_y)) ++bad_marginal;

    // (d) conditional weights in [0,1].
    if ((joint.weights.array() < 0.0).any() || (joint.weights.array() > 1.0).any())
      ++bad_range;

    const double xi = std::abs(bump_xi(basis, z));
    const DiscreteMeasure prod = product_measure(mx, my);
    const double w1 = wasserstein(joint, prod, 1).value;
    const double w2sq = std::pow(wasserstein(joint, prod, 2).value, 2);

    // (b) dual sandwich sqrt(2)|xi| <= W1 <= 2|xi|.
    if (w1 < std::sqrt(2.0) * xi - 1e-9 || w1 > 2.0 * xi + 1e-9) ++bad_dual;
    // (c) W1 <= W2^2 <= sqrt(2) W1 on the corner support.
    if (w2sq < w1 - 1e-9 || w2sq > std::sqrt(2.0) * w1 + 1e-9) ++bad_sandwich;
  }
  out.record(bad_marginal == 0, "exact marginal uniformity on z-mesh (" +
                                    std::to_string(mesh - bad_marginal) + "/" +
                                    std::to_string(mesh) + ")");
  out.record(bad_dual == 0, "sqrt(2)|xi| <= W1(joint, product) <= 2|xi| (" +
                                std::to_string(mesh - bad_dual) + "/" +
                                std::to_string(mesh) + ")");
  out.record(bad_sandwich == 0, "W1 <= W2^2 <= sqrt(2) W1 on corner support (" +
                                    std::to_string(mesh - bad_sandwich) + "/" +
                                    std::to_string(mesh) + ")");
  out.record(bad_range == 0, "conditional weights within [0,1] (" +
                                 std::to_string(mesh - bad_range) + "/" +
                                 std::to_string(mesh) + ")");
  return out;
}

std::vector<VerifyResult> verify_suite(const std::string& name) {
  std::vector<VerifyResult> results;
  if (name == "facts" || name == "all") results.push_back(verify_facts());
  if (name == "weedbach" || name == "all") results.push_back(verify_weedbach());
  if (name == "indykthaper" || name == "all") results.push_back(verify_indykthaper());
  if (name == "ustat" || name == "all") results.push_back(verify_ustat());
  if (name == "lowerbound" || name == "all") results.push_back(verify_lowerbound());
  if (results.empty())
    throw std::invalid_argument("unknown verify suite '" + name + "'");
  return results;
}

}  // namespace wci
