#pragma once

#include <cstddef>
#include <cstdint>

namespace lipquant {

struct ProblemConstants {
  std::size_t d = 1;
  double L = 1.0;
  double M = 1.0;
  double alpha = 0.5;
};

void validate(const ProblemConstants& c);

/// Error bound for the known-L algorithm after N calls.
double known_bound(const ProblemConstants& c, std::int64_t N);
/// Error bound for the unknown-L algorithm after N calls; needs L >= 1.
double unknown_bound(const ProblemConstants& c, std::int64_t N);
/// Smallest N accepted by unknown_bound (always 1 when d = 1).
std::int64_t unknown_bound_min_budget(const ProblemConstants& c);
/// Upper bound on the ledger after k levels.
double calls_upper(const ProblemConstants& c, int k);
/// Guaranteed level for budget N (clamped at 0).
int level_lower(const ProblemConstants& c, std::int64_t N);
double bracket_halfwidth(double L, int k, std::size_t d);

}  // namespace lipquant
