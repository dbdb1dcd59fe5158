#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lipquant/algo_known.hpp"

namespace lipquant {

/// floor(6N / (pi^2 (j+1)^2)).
std::int64_t candidate_budget(int j, std::int64_t N);
/// Largest j with candidate_budget(j, N) >= 1, found by enumeration.
int j_max(std::int64_t N);
/// floor(sqrt(6N)/pi) - 1, reported for comparison with j_max.
int j_max_closed_form(std::int64_t N);
double candidate_lipschitz(int j);

struct CandidateSchedule {
  int j = 0;
  double lipschitz = 1.0;
  std::int64_t budget = 0;
  bool active = true;
};

std::vector<CandidateSchedule> candidate_schedule(std::int64_t N);

struct CandidateReport {
  int j = 0;
  double lipschitz = 1.0;
  std::int64_t budget = 0;
  /// Ledger as printed: includes the charge that triggered retirement.
  std::int64_t n_calls = 1;
  /// Ledger restricted to levels that were actually refined.
  std::int64_t spent = 1;
  /// Level k at which the candidate stopped refining.
  std::optional<int> retired_at;
  std::size_t final_active_size = 1;
};

struct UnknownLevelRecord {
  int level = 0;
  double estimate = 0.0;
  double estimate_inf = 0.0;
  std::size_t union_size = 0;
  std::size_t live = 0;
  std::int64_t evaluations = 0;
  double active_mass = 0.0;
  double frozen_mass = 0.0;
  double total_mass = 0.0;
  /// Active-set size per candidate, indexed by j.
  std::vector<std::size_t> candidate_sizes;
  std::vector<bool> candidate_live;
};

struct UnknownOptions {
  int max_level = kDefaultMaxLevel;
  bool keep_active_sets = false;
};

struct UnknownRun {
  double estimate = 0.0;
  int level = 0;
  std::int64_t evaluations = 0;
  std::int64_t budget = 0;
  int j_max = 0;
  int j_max_closed_form = 0;
  std::vector<CandidateReport> candidates;
  std::vector<UnknownLevelRecord> trace;
  /// active_sets[k][j], filled when requested.
  std::vector<std::vector<ActiveSet>> active_sets;
  bool level_capped = false;
};

UnknownRun run_unknown(const Evaluator& f, const ProductMeasure& m, double alpha, std::int64_t N,
                       const UnknownOptions& opts = {});

/// Runtime retirement level of candidate j; 0 when j was never scheduled.
int retirement_level(const UnknownRun& run, int j);

/// Level reached by the known-L algorithm with L = 3^j under budget candidate_budget(j, N).
int standalone_level(const Evaluator& f, const ProductMeasure& m, double alpha, std::int64_t N, int j,
                     int max_level = kDefaultMaxLevel);

/// Smallest j with 3^j >= L.
int best_candidate(double L);

/// |estimate - true_q| <= 4 * 3^{j*} * delta^{min(k, l(j*))}.
bool unknown_error_bound_check(const UnknownRun& run, double true_q, double L_true, std::size_t d);

}  // namespace lipquant
