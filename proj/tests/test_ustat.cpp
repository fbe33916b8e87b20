#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wci/rng.hpp"
#include "wci/ustat.hpp"
#include "wci/verify.hpp"

using namespace wci;

TEST_CASE("phi indicator arithmetic") {
  CHECK(phi({1, 1}, {9, 0}, {1, 1}) == 1);   // 1 - 1*0
  CHECK(phi({1, 0}, {9, 0}, {1, 0}) == 0);   // 1 - 1*1
  CHECK(phi({0, 0}, {9, 0}, {1, 0}) == 0);   // 0 - 0*1
  for (int oi = 0; oi < 4; ++oi)
    for (int oj = 0; oj < 4; ++oj)
      for (int c = 0; c < 4; ++c) {
        const int v = phi({oi / 2, oi % 2}, {oj / 2, oj % 2}, {c / 2, c % 2});
        CHECK(v >= -1);
        CHECK(v <= 1);
      }
}

TEST_CASE("u_naive frozen values") {
  // All four observations in one cell: the kernel cancels identically.
  CHECK(u_naive({{1, 1}, {1, 1}, {1, 1}, {1, 1}}) == doctest::Approx(0.0));

  // Exhaustively enumerated value for two diagonal pairs (independent
  // rational-arithmetic enumeration gives exactly 2/3).
  CHECK(u_naive({{1, 1}, {1, 1}, {2, 2}, {2, 2}}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(u_naive({{1, 1}, {1, 1}, {1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(u_fast({{1, 1}, {1, 1}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("u_naive is symmetric in the observations") {
  Rng rng = make_rng(17);
  for (int t = 0; t < 30; ++t) {
    std::uniform_int_distribution<int> label(1, 3);
    CellSample cells;
    for (int i = 0; i < 6; ++i) cells.push_back({label(rng), label(rng)});
    const double base = u_naive(cells);
    CellSample shuffled = cells;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(u_naive(shuffled) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("u_fast equals u_naive on random instances") {
  Rng rng = make_rng(19);
  for (int t = 0; t < 120; ++t) {
    std::uniform_int_distribution<int> sigma_dist(4, 9);
    std::uniform_int_distribution<int> range_dist(2, 3);
    const int sigma = sigma_dist(rng);
    std::uniform_int_distribution<int> label(1, range_dist(rng));
    CellSample cells;
    for (int i = 0; i < sigma; ++i) cells.push_back({label(rng), label(rng)});
    CHECK(std::abs(u_naive(cells) - u_fast(cells)) < 1e-10);
    CHECK(std::abs(u_fast(cells)) <= 4.0);
  }
  // Identical observations collapse to zero at any sigma.
  CHECK(u_fast(CellSample(50, CellLabel{3, 7})) == doctest::Approx(0.0));
}

TEST_CASE("u_expectation closed form") {
  CHECK(u_expectation((Eigen::MatrixXd(2, 2) << 0.5, 0.0, 0.0, 0.5).finished()) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(u_expectation((Eigen::MatrixXd(2, 2) << 0.35, 0.15, 0.15, 0.35).finished()) ==
        doctest::Approx(0.04).epsilon(1e-12));
  // Any product table vanishes.
  const Eigen::VectorXd r = (Eigen::VectorXd(3) << 0.2, 0.3, 0.5).finished();
  const Eigen::RowVectorXd c = (Eigen::RowVectorXd(2) << 0.4, 0.6).finished();
  CHECK(u_expectation(r * c) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(u_expectation(Eigen::MatrixXd::Constant(2, 2, 0.3)),
                  std::invalid_argument);
}

TEST_CASE("unbiasedness at sigma = 4 by exhaustive enumeration") {
  const VerifyResult r = verify_ustat(150, 41);
  for (const auto& line : r.lines) INFO(line);
  CHECK(r.ok());
}

TEST_CASE("large-sample dependent data approaches the population value") {
  // Labels (1,1) or (2,2) equiprobable: population expectation is 0.25.
  Rng rng = make_rng(101);
  double worst = 0;
  for (int rep = 0; rep < 5; ++rep) {
    CellSample cells;
    for (int i = 0; i < 1000; ++i) {
      const int v = (rng() & 1) ? 1 : 2;
      cells.push_back({v, v});
    }
    worst = std::max(worst, std::abs(u_fast(cells) - 0.25));
  }
  CHECK(worst < 0.05);  // ~ a few sigma of the Monte Carlo error
}
