#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace wci {

/// A finitely supported probability measure on [0,1]^dim, dim in {1,2}.
///
/// Construction canonicalizes: support points are sorted lexicographically,
/// exact duplicates are merged (weights accumulated), zero-weight points are
/// dropped and the total weight is normalized to 1.
struct DiscreteMeasure {
  int dim = 0;
  Eigen::MatrixXd support;  // one point per row, `dim` columns
  Eigen::VectorXd weights;  // nonnegative, sums to 1

  Eigen::Index size() const { return support.rows(); }
};

/// Build a measure from raw points and weights.
/// Throws std::invalid_argument on empty support, mismatched lengths,
/// coordinates outside [0,1], weights below -1e-12 or total weight <= 0.
DiscreteMeasure make_measure(const Eigen::MatrixXd& points,
                             const Eigen::VectorXd& weights);

/// 1-D convenience overload.
DiscreteMeasure make_measure(const std::vector<double>& points,
                             const std::vector<double>& weights);

/// Uniform empirical measure (weight 1/n per row, duplicates accumulate).
DiscreteMeasure empirical(const Eigen::MatrixXd& points);

/// Total variation distance: half the l1 distance over the union of supports.
double tv_distance(const DiscreteMeasure& p, const DiscreteMeasure& q);

/// Product of two 1-D measures; support is the Cartesian product.
DiscreteMeasure product_measure(const DiscreteMeasure& px,
                                const DiscreteMeasure& py);

/// One observation (X, Y, Z) in the unit cube.
struct Sample {
  double x = 0, y = 0, z = 0;
};

/// Ordered i.i.d. sample; order is significant (tests consume a prefix).
struct Dataset {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
};

/// Parse the `x,y,z` CSV format. Throws std::runtime_error naming the
/// offending row on malformed input or out-of-range values.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace wci
