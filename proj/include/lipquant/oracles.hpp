#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lipquant/grid.hpp"
#include "lipquant/measure.hpp"

namespace lipquant {

struct TestProblem {
  std::string name;
  Evaluator f;
  std::size_t d = 1;
  double lipschitz = 1.0;
  ProductMeasure measure = ProductMeasure::uniform(1);
  double alpha = 0.5;
  std::optional<double> analytic_quantile;
};

/// 0.8x - 0.3 + exp(-11.534 x^1.95) + exp(-2 (x - 0.9)^2).
double paper_function_d1(double x);

TestProblem paper_f_d1();
TestProblem paper_f_d2(double alpha = 0.999);
TestProblem linear_d1(double alpha = 0.5);
/// Small fixed collection used by the property tests.
std::vector<TestProblem> test_suite();

/// Smallest midpoint-grid value whose cumulative mass reaches alpha.
double brute_force_quantile(const Evaluator& f, const ProductMeasure& m, double alpha, std::int64_t resolution);
double brute_force_quantile(const TestProblem& p, std::int64_t resolution);

/// d = 1 oracle: bisection on the level l with P(f(X) > l) computed from the located crossings of f = l.
double level_crossing_quantile(const Evaluator& f, const Marginal& m, double alpha, int scan = 100000);

/// Analytic value when known, the crossing oracle for d = 1, brute force at 2000 per axis otherwise.
double reference_quantile(const TestProblem& p);

/// Largest grid gradient norm (forward differences).
double estimate_lipschitz(const Evaluator& f, std::size_t d, std::int64_t resolution);
/// Largest |f(x) - f(y)| / |x - y| over seeded random pairs, half of them at distance ~1e-3.
double max_slope_random_pairs(const Evaluator& f, std::size_t d, int pairs, std::uint64_t seed);

inline constexpr double kLevelSetFloor = 1e-4;

struct LevelSetEstimate {
  /// Supremum over delta >= kLevelSetFloor of band volume / delta, on the midpoint grid.
  double M = 0.0;
  double worst_delta = 0.0;
  std::int64_t resolution = 0;
  /// (delta, band volume / delta).
  std::vector<std::pair<double, double>> ratios;
  /// false when the band volume does not shrink with delta.
  bool assumption_holds = true;
};

LevelSetEstimate estimate_level_set_M(const TestProblem& p, std::optional<double> q = std::nullopt,
                                      std::int64_t resolution = 0);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double half_width = 0.0;
  std::int64_t samples = 0;
};

MonteCarloEstimate monte_carlo_quantile(const TestProblem& p, std::int64_t samples, std::uint64_t seed);

struct RandomLipschitzFunction {
  Evaluator f;
  double lipschitz = 1.0;
  std::size_t d = 1;
};

/// Sum of distance cones, a sinusoid and a max of two linear forms, with its Lipschitz constant.
RandomLipschitzFunction random_lipschitz_function(std::size_t d, std::mt19937_64& rng);

/// Uniform double in [0,1) from the top 53 bits.
double unit_uniform(std::mt19937_64& rng);

}  // namespace lipquant
