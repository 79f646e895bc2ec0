#include "bmevt/blocks.hpp"
#include "bmevt/numeric.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace bmevt;
using Catch::Matchers::WithinAbs;

TEST_CASE("block_maxima examples") {
  const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(block_maxima(x, {3, 1}) == std::vector<double>{4, 9});
  CHECK(block_maxima(std::vector<double>{1, 2, 3}, {3, 0}) == std::vector<double>{3});
  CHECK(block_maxima(std::vector<double>{5, 5, 5, 5}, {2, 0}) == std::vector<double>{5, 5});
  CHECK_THROWS_AS(block_maxima(std::vector<double>{1, 2}, {3, 0}), std::invalid_argument);
  CHECK_THROWS_AS(block_maxima(x, {0, 0}), std::invalid_argument);
}

TEST_CASE("block_maxima properties") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng() % 200;
    std::vector<double> x(n);
    for (double& v : x) v = nd(rng);
    const std::size_t m = 1 + rng() % 5;
    const std::size_t l = rng() % 3;
    if (n < m + l) continue;
    const auto mx = block_maxima(x, {m, l});
    REQUIRE(mx.size() == n / (m + l));
    // every maximum is a sample value and dominates its block
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const auto b = x.begin() + static_cast<std::ptrdiff_t>(i * (m + l));
      CHECK(mx[i] == *std::max_element(b, b + static_cast<std::ptrdiff_t>(m)));
    }
    // m = 1, l = 0 is the identity
    CHECK(block_maxima(x, {1, 0}) == x);
  }
}

TEST_CASE("Ecdf is right-closed and suffix based") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THAT(Ecdf(x, 1)(2.0), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK(Ecdf(x, 2)(1.0) == 0.0);
  CHECK(Ecdf(std::vector<double>{1, 1, 1, 1}, 1)(1.0) == 1.0);
  CHECK(Ecdf(x, 1)(0.5) == 0.0);
  CHECK(Ecdf(x, 1)(10.0) == 1.0);
}

TEST_CASE("pseudo_observations examples") {
  const auto p = pseudo_observations(std::vector<double>{1, 2, 3, 4}, 2);
  REQUIRE(p.y.size() == 2);
  CHECK(p.k_tilde == 2);
  CHECK_THAT(p.y[0], WithinAbs(-2.0 * std::log(0.5), 1e-12));
  CHECK_THAT(p.y[0], WithinAbs(1.386294, 1e-6));
  CHECK(p.y[1] == 0.0);
  CHECK_FALSE(std::signbit(p.y[1]));
}

TEST_CASE("pseudo-observations are approximately unit exponential for iid data") {
  Rng rng(11);
  std::vector<double> x(10000);
  for (double& v : x) v = rng.uniform();
  const auto p = pseudo_observations(x, 50);
  CHECK(std::abs(mean(p.y) - 1.0) < 0.15);
  // exactly one block holds the global maximum, where F_n = 1
  CHECK(std::count(p.y.begin(), p.y.end(), 0.0) == 1);
  for (double y : p.y) CHECK(y >= 0.0);
}
