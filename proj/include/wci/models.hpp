#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wci/measure.hpp"
#include "wci/rng.hpp"

namespace wci {

/// The smooth mean-zero unit-L2 bump underlying the perturbation family:
/// a * exp(-1/(z(1-z))) * sin(2 pi z) on (0,1), zero outside. Evaluation is
/// exactly antisymmetric about 1/2 so symmetric quadratures cancel to zero.
double bump_h(double z);
double bump_h_prime(double z);
double bump_h_inf();        // dense-mesh sup |h|, 1.01 safety factor
double bump_h_prime_inf();  // dense-mesh sup |h'|, 1.01 safety factor

/// Scaled bump family: d disjoint copies sqrt(d) h(d z - j + 1) with signs.
struct BumpBasis {
  int d = 0;
  double theta = 0;      // rho = theta * d^{-3/2}
  double rho = 0;
  std::vector<int> nu;   // d signs in {-1, +1}
  double h_inf = 0;
  double h_prime_inf = 0;

  /// Perturbation amplitude rho * sqrt(d) * ||h||_inf; must be <= 1/4.
  double amplitude() const { return rho * std::sqrt(static_cast<double>(d)) * h_inf; }
};

/// xi(z) = rho * sum_j nu_j sqrt(d) h(d z - j + 1).
double bump_xi(const BumpBasis& basis, double z);

/// Throws std::invalid_argument when 1/4 - rho sqrt(d) ||h||_inf < 0.
BumpBasis make_bump_basis(int d, double theta, std::vector<int> nu);
BumpBasis make_bump_basis(int d, double theta, std::uint64_t nu_seed);

/// A samplable law of (X,Y,Z) with Z uniform on [0,1]. Models built from
/// small discrete conditionals expose them exactly; models that are
/// conditionally independent by construction are flagged product_form.
struct ConditionalModel {
  std::string name;
  double smoothness_L = 0;
  bool product_form = false;
  bool has_exact_conditionals = false;
  std::function<Sample(Rng&)> sampler;
  std::function<DiscreteMeasure(double)> conditional_xy;  // dim 2
  std::function<DiscreteMeasure(double)> conditional_x;   // dim 1
  std::function<DiscreteMeasure(double)> conditional_y;   // dim 1
};

/// X, Y, Z independent uniform on [0,1].
ConditionalModel null_independent_uniform();

/// Four equiprobable point masses at the corners of {0,1}^2, independent of z.
ConditionalModel null_four_corner();

/// Corner weights perturbed to 1/4 +- delta xi(z); X and Y marginals stay
/// uniform on {0,1} for every z.
ConditionalModel alt_four_corner(const BumpBasis& basis, int delta_sign);

/// X = Y uniform on {0.25, 0.75}, independent of Z: a far-from-null
/// alternative for power sanity checks.
ConditionalModel alt_deterministic_dependence();

/// Registry used by the CLI: name plus the alt_four_corner parameters.
ConditionalModel make_model(const std::string& name, int d = 0, double theta = 0,
                            std::uint64_t nu_seed = 0, int delta_sign = 1);

Dataset sample_dataset(const ConditionalModel& model, int count, Rng& rng);

/// Quadrature (midpoint rule, `panels` uniform panels) over z of the exact
/// W2 distance between the conditional joint and the product of conditional
/// marginals. Zero for product-form models.
double separation_tilde_psi(const ConditionalModel& model, int panels = 512);

/// sum_m W2(bin-averaged joint, product of bin-averaged marginals) * p_m for
/// d equal-width z-bins, with p_m = 1/d (built-ins have uniform Z).
double binned_separation(const ConditionalModel& model, int d,
                         int panels_per_bin = 64);

}  // namespace wci
