#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lipquant/grid.hpp"
#include "lipquant/measure.hpp"
#include "lipquant/quantile_core.hpp"

namespace lipquant {

/// Default refinement cap. At level 25 the cell radius is ~6e-13, well above double rounding of f.
inline constexpr int kDefaultMaxLevel = 25;

struct ActiveSet {
  int level = 0;
  std::vector<MultiIndex> indices;
};

struct FrozenMass {
  std::vector<MassPoint> points;
  double total() const;
};

struct BudgetLedger {
  std::int64_t n_calls = 1;
  std::int64_t n_budget = 0;
  /// history[k] is N_k, the ledger once level k has been paid for.
  std::vector<std::int64_t> history;
};

struct QuantileBracket {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int level = 0;
  std::int64_t calls_used = 0;
  std::int64_t evaluations = 0;
};

struct LevelRecord {
  int level = 0;
  double estimate = 0.0;
  double estimate_inf = 0.0;
  std::size_t active = 0;
  std::size_t survivors = 0;
  std::int64_t calls = 0;
  std::int64_t evaluations = 0;
  double active_mass = 0.0;
  double frozen_mass = 0.0;
  double total_mass = 0.0;
};

struct KnownOptions {
  int max_level = kDefaultMaxLevel;
  bool keep_active_sets = false;
  bool keep_query_points = false;
};

struct KnownRun {
  QuantileBracket bracket;
  BudgetLedger ledger;
  std::vector<LevelRecord> trace;
  std::vector<ActiveSet> active_sets;
  std::vector<Point> query_points;
  double lipschitz = 0.0;
  bool level_capped = false;
};

KnownRun run_known(const Evaluator& f, double L, const ProductMeasure& m, double alpha,
                   std::int64_t N, const KnownOptions& opts = {});

/// Level-k estimate over the complete grid; test oracle only.
double full_grid_estimate(const Evaluator& f, const ProductMeasure& m, double alpha, int k);

struct PruneResult {
  ActiveSet next;
  std::vector<std::size_t> survivors;
  FrozenMass frozen;
};

/// Keeps indices whose value lies in [estimate - 2L delta^k, estimate + 2L delta^k] and returns their children.
PruneResult prune(const ActiveSet& active, std::span<const double> values, double estimate, double L,
                  const ProductMeasure& m);

}  // namespace lipquant
