#include <cmath>
#include <initializer_list>
#include <numbers>

#include "doctest.h"
#include "lipquant/bounds.hpp"

using namespace lipquant;

TEST_CASE("known-L bound") {
  CHECK(known_bound({1, 1.0, 2.0, 0.5}, 1) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(known_bound({2, 1.0, 1.0, 0.5}, 2) == doctest::Approx(27.0).epsilon(1e-14));
  // independent float evaluation of the same constants
  CHECK(known_bound({1, 2.0, 1.5, 0.5}, 10) == doctest::Approx(1.3160740129524922).epsilon(1e-13));
  CHECK(known_bound({2, 1.5 * std::sqrt(2.0), 0.15, 0.5}, 100) == doctest::Approx(0.1840909090909092).epsilon(1e-13));
  CHECK_THROWS(known_bound({2, 1.0, 1.0, 0.5}, 1));
  CHECK_THROWS(known_bound({1, 1.0, 1.0, 0.5}, 0));
  CHECK_THROWS(known_bound({1, -1.0, 1.0, 0.5}, 5));
}

TEST_CASE("known-L bound decreases in N and grows in L and M") {
  for (std::size_t d : {1u, 2u, 3u}) {
    const ProblemConstants c{d, 1.7, 0.8, 0.9};
    double prev = known_bound(c, 2);
    for (std::int64_t n = 3; n < 3000; n += 37) {
      const double b = known_bound(c, n);
      CHECK(b < prev);
      prev = b;
      CHECK(known_bound({d, 2.0, 0.8, 0.9}, n) > b);
      CHECK(known_bound({d, 1.7, 1.0, 0.9}, n) > b);
    }
  }
}

TEST_CASE("unknown-L bound") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const ProblemConstants one{1, 1.0, 1.0, 0.5};
  const double rho = std::pow(3.0, -1.0 / (8.0 * pi2));
  CHECK(unknown_bound(one, 11) / unknown_bound(one, 10) == doctest::Approx(rho).epsilon(1e-13));
  CHECK(unknown_bound({1, 3.0, 1.0, 0.5}, 20) == doctest::Approx(62.23136727734025).epsilon(1e-13));
  CHECK(unknown_bound({2, 3.0, 0.5, 0.5}, 100) == doctest::Approx(919.9230389812615).epsilon(1e-13));
  CHECK(unknown_bound_min_budget({2, 3.0, 0.5, 0.5}) == 30);
  CHECK(unknown_bound_min_budget({1, 3.0, 0.5, 0.5}) == 1);
  CHECK_THROWS(unknown_bound({2, 3.0, 0.5, 0.5}, 29));
  CHECK_NOTHROW(unknown_bound({2, 3.0, 0.5, 0.5}, 30));
  CHECK_THROWS(unknown_bound({1, 0.5, 1.0, 0.5}, 10));
}

TEST_CASE("unknown-L bound dominates the known-L bound") {
  for (std::size_t d : {1u, 2u}) {
    for (double L : {1.0, 1.6, 4.0}) {
      for (double M : {0.1, 1.0, 3.0}) {
        const ProblemConstants c{d, L, M, 0.5};
        for (std::int64_t n = std::max<std::int64_t>(10, unknown_bound_min_budget(c)); n <= 10000; n += 97) {
          CHECK(unknown_bound(c, n) >= known_bound(c, n));
        }
      }
    }
  }
}

TEST_CASE("calls upper bound") {
  CHECK(calls_upper({1, 1.0, 2.0, 0.5}, 0) == 1.0);
  CHECK(calls_upper({1, 1.0, 2.0, 0.5}, 3) == 25.0);
  CHECK(calls_upper({2, 1.0, 1.0, 0.5}, 1) == doctest::Approx(1.0 + 18.0 * std::sqrt(2.0)));
  CHECK(calls_upper({1, 2.0, 1.5, 0.5}, 7) == 85.0);
  CHECK(calls_upper({2, 3.0, 0.5, 0.5}, 3) == doctest::Approx(497.3889603929564).epsilon(1e-13));
  CHECK_THROWS(calls_upper({1, 1.0, 1.0, 0.5}, -1));
}

TEST_CASE("guaranteed level") {
  CHECK(level_lower({1, 1.0, 2.0, 0.5}, 9) == 1);
  CHECK(level_lower({1, 1.0, 2.0, 0.5}, 1) == 0);
  CHECK(level_lower({2, 1.0, 1.0, 0.5}, 2) == 0);
  // the guaranteed level is the largest k with calls_upper(k) <= N in d = 1
  for (std::int64_t n = 1; n < 200; ++n) {
    const ProblemConstants c{1, 1.3, 0.7, 0.5};
    const int k = level_lower(c, n);
    CHECK(calls_upper(c, k) <= static_cast<double>(n) + 1e-9);
    CHECK(calls_upper(c, k + 1) > static_cast<double>(n));
  }
}

TEST_CASE("bracket half-width") {
  CHECK(bracket_halfwidth(1.0, 0, 1) == 0.5);
  CHECK(bracket_halfwidth(2.0, 2, 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(bracket_halfwidth(std::sqrt(2.0), 1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS(bracket_halfwidth(0.0, 1, 1));
}
