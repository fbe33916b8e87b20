#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "wci/measure.hpp"
#include "wci/rng.hpp"
#include "wci/verify.hpp"

using namespace wci;

namespace {

Eigen::MatrixXd pts2(std::initializer_list<std::pair<double, double>> list) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(list.size()), 2);
  Eigen::Index r = 0;
  for (auto [x, y] : list) {
    m(r, 0) = x;
    m(r, 1) = y;
    ++r;
  }
  return m;
}

Eigen::VectorXd vec(std::initializer_list<double> list) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(list.size()));
  Eigen::Index i = 0;
  for (double x : list) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("make_measure basics") {
  const DiscreteMeasure m = make_measure(pts2({{0, 0}, {1, 1}}), vec({0.5, 0.5}));
  CHECK(m.dim == 2);
  CHECK(m.size() == 2);
  CHECK(m.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // Exact duplicates merge.
  const DiscreteMeasure dup = make_measure(pts2({{0, 0}, {0, 0}}), vec({0.3, 0.7}));
  CHECK(dup.size() == 1);
  CHECK(dup.weights[0] == doctest::Approx(1.0));

  // Total weight renormalizes.
  const DiscreteMeasure scaled = make_measure(std::vector<double>{0.5}, std::vector<double>{2.0});
  CHECK(scaled.size() == 1);
  CHECK(scaled.weights[0] == 1.0);
}

TEST_CASE("make_measure rejects bad input") {
  CHECK_THROWS_AS(make_measure(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_measure(pts2({{0, 0}}), vec({0.0})), std::invalid_argument);
  CHECK_THROWS_AS(make_measure(pts2({{0, 1.5}}), vec({1.0})), std::invalid_argument);
  CHECK_THROWS_AS(make_measure(pts2({{0, 0}, {1, 1}}), vec({0.5, -0.5})),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_measure(pts2({{0, 0}}), vec({0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("empirical counts duplicates") {
  const DiscreteMeasure m = empirical(pts2({{0, 0}, {0, 0}, {1, 1}, {1, 1}}));
  CHECK(m.size() == 2);
  CHECK(m.weights[0] == doctest::Approx(0.5));
  CHECK(m.weights[1] == doctest::Approx(0.5));

  const DiscreteMeasure single = empirical(pts2({{0.2, 0.3}}));
  CHECK(single.size() == 1);
  CHECK(single.weights[0] == 1.0);

  const DiscreteMeasure corners = empirical(pts2({{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  CHECK(corners.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(corners.weights[i] == doctest::Approx(0.25));

  // n copies of one point collapse to that point mass.
  Eigen::MatrixXd reps(7, 2);
  for (int i = 0; i < 7; ++i) reps.row(i) << 0.25, 0.75;
  const DiscreteMeasure mass = empirical(reps);
  CHECK(mass.size() == 1);
  CHECK(mass.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("tv_distance examples") {
  const DiscreteMeasure p =
      make_measure(pts2({{0, 0}, {0, 1}, {1, 0}, {1, 1}}), vec({0.35, 0.15, 0.15, 0.35}));
  const DiscreteMeasure uniform =
      make_measure(pts2({{0, 0}, {0, 1}, {1, 0}, {1, 1}}), vec({0.25, 0.25, 0.25, 0.25}));
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(p, uniform) == doctest::Approx(0.2).epsilon(1e-12));

  const DiscreteMeasure a = make_measure(pts2({{0, 0}}), vec({1.0}));
  const DiscreteMeasure b = make_measure(pts2({{1, 1}}), vec({1.0}));
  CHECK(tv_distance(a, b) == doctest::Approx(1.0));

  const DiscreteMeasure one_d = make_measure(std::vector<double>{0.5}, std::vector<double>{1.0});
  CHECK_THROWS_AS(tv_distance(a, one_d), std::invalid_argument);
}

TEST_CASE("tv_distance is a metric on random triples") {
  Rng rng = make_rng(11);
  for (int t = 0; t < 200; ++t) {
    const DiscreteMeasure p = random_discrete_measure(2, 8, rng);
    const DiscreteMeasure q = random_discrete_measure(2, 8, rng);
    const DiscreteMeasure r = random_discrete_measure(2, 8, rng);
    const double pq = tv_distance(p, q);
    CHECK(pq == tv_distance(q, p));
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0);
    CHECK(pq <= tv_distance(q, r) + tv_distance(r, p) + 1e-12);
  }
}

TEST_CASE("csv round trip and validation") {
  Dataset data;
  data.samples = {{0.1, 0.2, 0.3}, {1.0, 0.0, 0.5}};
  std::ostringstream out;
  write_dataset_csv(out, data);
  std::istringstream in(out.str());
  const Dataset back = read_dataset_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back.samples[0].x == 0.1);
  CHECK(back.samples[1].z == 0.5);

  std::istringstream bad_header("a,b,c\n0,0,0\n");
  CHECK_THROWS_WITH_AS(read_dataset_csv(bad_header),
                       doctest::Contains("expected header"), std::runtime_error);

  std::istringstream out_of_range("x,y,z\n0.1,0.2,0.3\n0.5,1.5,0.2\n");
  CHECK_THROWS_WITH_AS(read_dataset_csv(out_of_range), doctest::Contains("row 3"),
                       std::runtime_error);

  std::istringstream missing_field("x,y,z\n0.1,0.2\n");
  CHECK_THROWS_WITH_AS(read_dataset_csv(missing_field), doctest::Contains("row 2"),
                       std::runtime_error);
}
