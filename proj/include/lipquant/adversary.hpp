#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lipquant/grid.hpp"

namespace lipquant {

/// 5^{1/d} / (6^{1/d} - 5^{1/d}); the bump slope must exceed it.
double adversary_slope_threshold(std::size_t d);
/// 1 / (12 (3^{d-1} - 1) 3^{1/(d-1)}).
double adversary_gap_constant(std::size_t d);
/// Smallest j with 3^{j(d-1)} >= 3N.
int adversary_level(std::size_t d, std::size_t n_queries);

struct AdversaryD2 {
  std::vector<Point> queries;
  int level = 0;
  double slope_boost = 0.0;
  /// Second digit of every cell meeting x_1 = 1/2 (the first digit is (3^level - 1)/2).
  std::vector<std::int64_t> hyperplane_cells;
  std::vector<std::int64_t> tilde_cells;
  double gap_constant = 0.0;
  double claimed_gap = 0.0;
  Evaluator f_bar;
  Evaluator f_tilde;
};

/// Default slope is twice the threshold.
AdversaryD2 build_adversary_d2(const std::vector<Point>& queries, std::optional<double> slope_boost = std::nullopt);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct AdversaryD1 {
  std::vector<double> queries;
  double rho = 0.5;
  double slope_boost = 4.0;
  /// candidates[j-1] holds the pieces of I_j; the last entry is I_{N+1}.
  std::vector<std::vector<Interval>> candidates;
  std::vector<std::size_t> free_candidates;
  std::size_t chosen = 0;
  double gap_constant = 0.0;
  double claimed_gap = 0.0;
  Evaluator f_bar;
  Evaluator f_tilde;
};

/// Largest admissible constant for (rho, L), shrunk by (1 - 1e-6).
double adversary_d1_constant(double rho, double slope_boost);

/// Picks the unqueried candidate of smallest total length unless `choose` names one (0-based).
AdversaryD1 build_adversary_d1(const std::vector<double>& queries, double rho = 0.5, double slope_boost = 4.0,
                               std::optional<std::size_t> choose = std::nullopt);

struct SeparationReport {
  std::size_t n = 0;
  double claimed_gap = 0.0;
  double q_bar = 0.0;
  double q_tilde = 0.0;
  double measured_gap = 0.0;
  double max_residual = 0.0;
  /// Any estimator built from the query values errs by at least this much on one of the pair.
  double estimator_lower_bound = 0.0;
  bool agreement = false;
  bool gap_ok = false;
  bool pass() const { return agreement && gap_ok; }
};

/// Quantiles at alpha = 1/2 under the uniform law, by brute force; q_bar_exact replaces the oracle for f_bar.
SeparationReport verify_separation(const Evaluator& f_bar, const Evaluator& f_tilde, const std::vector<Point>& queries,
                                   double claimed_gap, std::size_t d, std::int64_t resolution,
                                   std::optional<double> q_bar_exact = std::nullopt);

/// Query layouts: "column" / "spread" occupy construction cells, "random" is seeded uniform,
/// "algorithm" takes the points evaluated by the known-L algorithm on f_bar with budget N.
std::vector<Point> adversary_queries(std::size_t d, std::size_t n, const std::string& layout, std::uint64_t seed = 7);

}  // namespace lipquant
