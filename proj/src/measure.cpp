#include "wci/measure.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wci {

namespace {

constexpr double kWeightSlack = 1e-12;

bool lex_less(const Eigen::MatrixXd& pts, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index c = 0; c < pts.cols(); ++c) {
    if (pts(a, c) != pts(b, c)) return pts(a, c) < pts(b, c);
  }
  return false;
}

}  // namespace

DiscreteMeasure make_measure(const Eigen::MatrixXd& points,
                             const Eigen::VectorXd& weights) {
  const Eigen::Index n = points.rows();
  const Eigen::Index dim = points.cols();
  if (n == 0) throw std::invalid_argument("make_measure: empty support");
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("make_measure: dim must be 1 or 2");
  if (weights.size() != n)
    throw std::invalid_argument("make_measure: points/weights length mismatch");
  if ((points.array() < 0.0).any() || (points.array() > 1.0).any())
    throw std::invalid_argument("make_measure: coordinates outside [0,1]");
  if ((weights.array() < -kWeightSlack).any())
    throw std::invalid_argument("make_measure: negative weight");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return lex_less(points, a, b); });

  // Merge exact duplicates, clamp tiny negatives, drop zero-weight points.
  std::vector<Eigen::Index> rep;
  std::vector<double> acc;
  for (Eigen::Index idx : order) {
    const double w = std::max(weights[idx], 0.0);
    if (!rep.empty() && (points.row(idx).array() == points.row(rep.back()).array()).all()) {
      acc.back() += w;
    } else {
      rep.push_back(idx);
      acc.push_back(w);
    }
  }
  double total = std::accumulate(acc.begin(), acc.end(), 0.0);
  if (total <= 0.0)
    throw std::invalid_argument("make_measure: total weight is not positive");

  Eigen::Index kept = 0;
  for (double w : acc) kept += (w > 0.0);
  if (kept == 0) throw std::invalid_argument("make_measure: all weights zero");

  DiscreteMeasure m;
  m.dim = static_cast<int>(dim);
  m.support.resize(kept, dim);
  m.weights.resize(kept);
  Eigen::Index out = 0;
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (acc[i] <= 0.0) continue;
    m.support.row(out) = points.row(rep[i]);
    m.weights[out] = acc[i] / total;
    ++out;
  }
  return m;
}

DiscreteMeasure make_measure(const std::vector<double>& points,
                             const std::vector<double>& weights) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(points.size()), 1);
  Eigen::VectorXd w(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < points.size(); ++i) pts(static_cast<Eigen::Index>(i), 0) = points[i];
  for (std::size_t i = 0; i < weights.size(); ++i) w[static_cast<Eigen::Index>(i)] = weights[i];
  return make_measure(pts, w);
}

DiscreteMeasure empirical(const Eigen::MatrixXd& points) {
  if (points.rows() == 0) throw std::invalid_argument("empirical: empty input");
  return make_measure(points, Eigen::VectorXd::Constant(points.rows(),
                                                        1.0 / static_cast<double>(points.rows())));
}

double tv_distance(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (p.dim != q.dim) throw std::invalid_argument("tv_distance: dimension mismatch");
  // Both supports are sorted; walk them in lockstep.
  const Eigen::Index np = p.size(), nq = q.size();
  Eigen::Index i = 0, j = 0;
  double sum = 0.0;
  auto cmp = [&](Eigen::Index a, Eigen::Index b) {
    for (int c = 0; c < p.dim; ++c) {
      if (p.support(a, c) != q.support(b, c)) return p.support(a, c) < q.support(b, c) ? -1 : 1;
    }
    return 0;
  };
  while (i < np || j < nq) {
    if (i == np) {
      sum += q.weights[j++];
    } else if (j == nq) {
      sum += p.weights[i++];
    } else {
      const int c = cmp(i, j);
      if (c < 0) sum += p.weights[i++];
      else if (c > 0) sum += q.weights[j++];
      else sum += std::abs(p.weights[i++] - q.weights[j++]);
    }
  }
  return std::min(0.5 * sum, 1.0);  // rounding can push the sum past 2
}

DiscreteMeasure product_measure(const DiscreteMeasure& px,
                                const DiscreteMeasure& py) {
  if (px.dim != 1 || py.dim != 1)
    throw std::invalid_argument("product_measure: both factors must be 1-D");
  const Eigen::Index nx = px.size(), ny = py.size();
  Eigen::MatrixXd pts(nx * ny, 2);
  Eigen::VectorXd w(nx * ny);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < ny; ++j, ++r) {
      pts(r, 0) = px.support(i, 0);
      pts(r, 1) = py.support(j, 0);
      w[r] = px.weights[i] * py.weights[j];
    }
  }
  return make_measure(pts, w);
}

namespace {

double parse_coord(const std::string& field, std::size_t row, const char* name) {
  double v = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("csv row " + std::to_string(row) + ": cannot parse " +
                             name + " value '" + field + "'");
  if (!(v >= 0.0 && v <= 1.0))
    throw std::runtime_error("csv row " + std::to_string(row) + ": " + name +
                             " value " + field + " outside [0,1]");
  return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z")
    throw std::runtime_error("csv: expected header 'x,y,z', got '" + line + "'");

  Dataset data;
  std::size_t row = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 3> fields;
    std::size_t start = 0;
    for (int f = 0; f < 3; ++f) {
      std::size_t comma = line.find(',', start);
      if (f < 2 && comma == std::string::npos)
        throw std::runtime_error("csv row " + std::to_string(row) + ": expected 3 fields");
      if (f == 2 && comma != std::string::npos)
        throw std::runtime_error("csv row " + std::to_string(row) + ": expected 3 fields");
      fields[static_cast<std::size_t>(f)] =
          line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      start = comma + 1;
    }
    Sample s;
    s.x = parse_coord(fields[0], row, "x");
    s.y = parse_coord(fields[1], row, "y");
    s.z = parse_coord(fields[2], row, "z");
    data.samples.push_back(s);
  }
  return data;
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "x,y,z\n";
  out.precision(17);
  for (const Sample& s : data.samples) out << s.x << ',' << s.y << ',' << s.z << '\n';
}

}  // namespace wci
