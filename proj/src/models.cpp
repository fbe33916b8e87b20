#include "wci/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wci/ot.hpp"

namespace wci {

namespace {

double bump_raw(double z) {
  if (z <= 0.0 || z >= 1.0 || z == 0.5) return 0.0;
  if (z > 0.5) return -bump_raw(1.0 - z);
  return std::exp(-1.0 / (z * (1.0 - z))) * std::sin(2.0 * std::numbers::pi * z);
}

double bump_raw_prime(double z) {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  const double u = z * (1.0 - z);
  const double g = std::exp(-1.0 / u);
  const double gp = g * (1.0 - 2.0 * z) / (u * u);
  const double s = std::sin(2.0 * std::numbers::pi * z);
  const double sp = 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * z);
  return gp * s + g * sp;
}

// Composite Simpson on [0,1]; integrands here are smooth with flat endpoints.
template <typename F>
double simpson(F f, int panels) {
  const double h = 1.0 / panels;
  double sum = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return sum * h / 3.0;
}

struct BumpConstants {
  double scale;        // a with int h^2 = 1
  double h_inf;        // with 1.01 safety factor
  double h_prime_inf;  // with 1.01 safety factor
};

const BumpConstants& bump_constants() {
  static const BumpConstants c = [] {
    BumpConstants out{};
    const double raw_l2 = simpson([](double z) { return bump_raw(z) * bump_raw(z); }, 1 << 14);
    out.scale = 1.0 / std::sqrt(raw_l2);
    double m = 0, mp = 0;
    const int mesh = 100000;
    for (int i = 0; i <= mesh; ++i) {
      const double z = static_cast<double>(i) / mesh;
      m = std::max(m, std::abs(bump_raw(z)));
      mp = std::max(mp, std::abs(bump_raw_prime(z)));
    }
    out.h_inf = 1.01 * out.scale * m;
    out.h_prime_inf = 1.01 * out.scale * mp;
    return out;
  }();
  return c;
}

}  // namespace

double bump_h(double z) { return bump_constants().scale * bump_raw(z); }
double bump_h_prime(double z) { return bump_constants().scale * bump_raw_prime(z); }
double bump_h_inf() { return bump_constants().h_inf; }
double bump_h_prime_inf() { return bump_constants().h_prime_inf; }

double bump_xi(const BumpBasis& basis, double z) {
  if (z < 0.0 || z > 1.0) return 0.0;
  int j = std::min(static_cast<int>(z * basis.d) + 1, basis.d);
  const double local = basis.d * z - j + 1;
  return basis.rho * basis.nu[static_cast<std::size_t>(j - 1)] *
         std::sqrt(static_cast<double>(basis.d)) * bump_h(local);
}

BumpBasis make_bump_basis(int d, double theta, std::vector<int> nu) {
  if (d < 1) throw std::invalid_argument("make_bump_basis: d must be positive");
  if (!(theta > 0)) throw std::invalid_argument("make_bump_basis: theta must be positive");
  if (static_cast<int>(nu.size()) != d)
    throw std::invalid_argument("make_bump_basis: need d signs");
  for (int s : nu)
    if (s != 1 && s != -1) throw std::invalid_argument("make_bump_basis: signs must be +-1");
  BumpBasis basis;
  basis.d = d;
  basis.theta = theta;
  basis.rho = theta * std::pow(static_cast<double>(d), -1.5);
  basis.nu = std::move(nu);
  basis.h_inf = bump_h_inf();
  basis.h_prime_inf = bump_h_prime_inf();
  if (0.25 - basis.amplitude() < 0.0)
    throw std::invalid_argument("make_bump_basis: rho sqrt(d) ||h||_inf exceeds 1/4");
  return basis;
}

BumpBasis make_bump_basis(int d, double theta, std::uint64_t nu_seed) {
  Rng rng = make_rng(derive_seed(nu_seed, "nu-signs"));
  std::vector<int> nu(static_cast<std::size_t>(d));
  for (int& s : nu) s = (rng() & 1) ? 1 : -1;
  return make_bump_basis(d, theta, std::move(nu));
}

namespace {

DiscreteMeasure corner_joint(double w_plus) {
  // Complementary weight derived from w_plus so every row/column sum is
  // exactly 0.5 in floating point.
  const double w_minus = 0.5 - w_plus;
  Eigen::MatrixXd pts(4, 2);
  pts << 0, 0, 0, 1, 1, 0, 1, 1;
  Eigen::VectorXd w(4);
  w << w_plus, w_minus, w_minus, w_plus;
  return make_measure(pts, w);
}

DiscreteMeasure uniform_binary() {
  return make_measure(std::vector<double>{0.0, 1.0}, std::vector<double>{0.5, 0.5});
}

DiscreteMeasure point_pair_quarters() {
  return make_measure(std::vector<double>{0.25, 0.75}, std::vector<double>{0.5, 0.5});
}

}  // namespace

ConditionalModel null_independent_uniform() {
  ConditionalModel m;
  m.name = "null_independent_uniform";
  m.smoothness_L = 0;
  m.product_form = true;
  m.has_exact_conditionals = false;
  m.sampler = [](Rng& rng) {
    return Sample{uniform01(rng), uniform01(rng), uniform01(rng)};
  };
  return m;
}

ConditionalModel null_four_corner() {
  ConditionalModel m;
  m.name = "null_four_corner";
  m.smoothness_L = 0;
  m.product_form = true;
  m.has_exact_conditionals = true;
  m.sampler = [](Rng& rng) {
    const std::uint64_t bits = rng();
    return Sample{static_cast<double>(bits & 1), static_cast<double>((bits >> 1) & 1),
                  uniform01(rng)};
  };
  m.conditional_xy = [](double) { return corner_joint(0.25); };
  m.conditional_x = [](double) { return uniform_binary(); };
  m.conditional_y = [](double) { return uniform_binary(); };
  return m;
}

ConditionalModel alt_four_corner(const BumpBasis& basis, int delta_sign) {
  if (delta_sign != 1 && delta_sign != -1)
    throw std::invalid_argument("alt_four_corner: delta_sign must be +-1");
  if (0.25 - basis.amplitude() < 0.0)
    throw std::invalid_argument("alt_four_corner: invalid basis");
  ConditionalModel m;
  m.name = "alt_four_corner";
  m.smoothness_L = 2.0 * std::pow(static_cast<double>(basis.d), 1.5) * basis.rho *
                   basis.h_prime_inf;
  m.product_form = false;
  m.has_exact_conditionals = true;
  const double delta = delta_sign;
  auto w_plus_at = [basis, delta](double z) {
    return std::clamp(0.25 + delta * bump_xi(basis, z), 0.0, 0.5);
  };
  m.sampler = [w_plus_at](Rng& rng) {
    const double z = uniform01(rng);
    const double wp = w_plus_at(z);
    const double u = uniform01(rng);
    // Corner order: (0,0), (1,1), (0,1), (1,0).
    if (u < wp) return Sample{0, 0, z};
    if (u < 2 * wp) return Sample{1, 1, z};
    if (u < wp + 0.5) return Sample{0, 1, z};
    return Sample{1, 0, z};
  };
  m.conditional_xy = [w_plus_at](double z) { return corner_joint(w_plus_at(z)); };
  m.conditional_x = [](double) { return uniform_binary(); };
  m.conditional_y = [](double) { return uniform_binary(); };
  return m;
}

ConditionalModel alt_deterministic_dependence() {
  ConditionalModel m;
  m.name = "alt_deterministic_dependence";
  m.smoothness_L = 0;
  m.product_form = false;
  m.has_exact_conditionals = true;
  m.sampler = [](Rng& rng) {
    const double v = (rng() & 1) ? 0.25 : 0.75;
    return Sample{v, v, uniform01(rng)};
  };
  m.conditional_xy = [](double) {
    Eigen::MatrixXd pts(2, 2);
    pts << 0.25, 0.25, 0.75, 0.75;
    Eigen::VectorXd w(2);
    w << 0.5, 0.5;
    return make_measure(pts, w);
  };
  m.conditional_x = [](double) { return point_pair_quarters(); };
  m.conditional_y = [](double) { return point_pair_quarters(); };
  return m;
}

ConditionalModel make_model(const std::string& name, int d, double theta,
                            std::uint64_t nu_seed, int delta_sign) {
  if (name == "null_independent_uniform") return null_independent_uniform();
  if (name == "null_four_corner") return null_four_corner();
  if (name == "alt_deterministic_dependence") return alt_deterministic_dependence();
  if (name == "alt_four_corner") {
    if (d < 1 || !(theta > 0))
      throw std::invalid_argument("alt_four_corner requires --d and --theta");
    return alt_four_corner(make_bump_basis(d, theta, nu_seed), delta_sign);
  }
  throw std::invalid_argument("unknown model '" + name + "'");
}

Dataset sample_dataset(const ConditionalModel& model, int count, Rng& rng) {
  Dataset data;
  data.samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) data.samples.push_back(model.sampler(rng));
  return data;
}

double separation_tilde_psi(const ConditionalModel& model, int panels) {
  if (model.product_form) return 0.0;
  if (!model.has_exact_conditionals)
    throw std::invalid_argument("separation_tilde_psi: conditionals unavailable");
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double z = (i + 0.5) / panels;
    const DiscreteMeasure joint = model.conditional_xy(z);
    const DiscreteMeasure prod =
        product_measure(model.conditional_x(z), model.conditional_y(z));
    sum += wasserstein(joint, prod, 2).value;
  }
  return sum / panels;
}

double binned_separation(const ConditionalModel& model, int d, int panels_per_bin) {
  if (d < 1) throw std::invalid_argument("binned_separation: d must be positive");
  if (model.product_form) return 0.0;
  if (!model.has_exact_conditionals)
    throw std::invalid_argument("binned_separation: conditionals unavailable");
  if (panels_per_bin % 2) ++panels_per_bin;  // even count keeps quadrature
                                             // symmetric within each bin
  double sum = 0.0;
  for (int m = 0; m < d; ++m) {
    // Accumulate the quadrature mixture of conditionals over the bin.
    std::vector<double> jx, jy, jw, mxp, mxw, myp, myw;
    for (int t = 0; t < panels_per_bin; ++t) {
      const double z = (m + (t + 0.5) / panels_per_bin) / d;
      const DiscreteMeasure joint = model.conditional_xy(z);
      for (Eigen::Index r = 0; r < joint.size(); ++r) {
        jx.push_back(joint.support(r, 0));
        jy.push_back(joint.support(r, 1));
        jw.push_back(joint.weights[r] / panels_per_bin);
      }
      const DiscreteMeasure mx = model.conditional_x(z);
      for (Eigen::Index r = 0; r < mx.size(); ++r) {
        mxp.push_back(mx.support(r, 0));
        mxw.push_back(mx.weights[r] / panels_per_bin);
      }
      const DiscreteMeasure my = model.conditional_y(z);
      for (Eigen::Index r = 0; r < my.size(); ++r) {
        myp.push_back(my.support(r, 0));
        myw.push_back(my.weights[r] / panels_per_bin);
      }
    }
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(jx.size()), 2);
    Eigen::VectorXd w(static_cast<Eigen::Index>(jx.size()));
    for (std::size_t r = 0; r < jx.size(); ++r) {
      pts(static_cast<Eigen::Index>(r), 0) = jx[r];
      pts(static_cast<Eigen::Index>(r), 1) = jy[r];
      w[static_cast<Eigen::Index>(r)] = jw[r];
    }
    const DiscreteMeasure bin_joint = make_measure(pts, w);
    const DiscreteMeasure bin_x = make_measure(mxp, mxw);
    const DiscreteMeasure bin_y = make_measure(myp, myw);
    sum += wasserstein(bin_joint, product_measure(bin_x, bin_y), 2).value / d;
  }
  return sum;
}

}  // namespace wci
