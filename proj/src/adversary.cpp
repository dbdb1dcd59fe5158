#include "lipquant/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lipquant/algo_known.hpp"
#include "lipquant/measure.hpp"
#include "lipquant/oracles.hpp"

namespace lipquant {

double adversary_slope_threshold(std::size_t d) {
  if (d < 1) throw std::invalid_argument("adversary_slope_threshold: d must be at least 1");
  const double a = std::pow(5.0, 1.0 / static_cast<double>(d));
  const double b = std::pow(6.0, 1.0 / static_cast<double>(d));
  return a / (b - a);
}

double adversary_gap_constant(std::size_t d) {
  if (d < 2) throw std::invalid_argument("adversary_gap_constant: d must be at least 2");
  const double dm = static_cast<double>(d) - 1.0;
  return 1.0 / (12.0 * (std::pow(3.0, dm) - 1.0) * std::pow(3.0, 1.0 / dm));
}

int adversary_level(std::size_t d, std::size_t n_queries) {
  if (d < 2) throw std::invalid_argument("adversary_level: d must be at least 2");
  const double target = 3.0 * static_cast<double>(n_queries);
  int j = 1;
  while (std::pow(3.0, static_cast<double>(j) * (static_cast<double>(d) - 1.0)) < target) ++j;
  return j;
}

namespace {

constexpr double kContainTol = 1e-9;

bool in_closed(double v, double lo, double hi) { return v >= lo && v <= hi; }

}  // namespace

AdversaryD2 build_adversary_d2(const std::vector<Point>& queries, std::optional<double> slope_boost) {
  if (queries.empty()) throw std::invalid_argument("build_adversary_d2: need at least one query point");
  for (const auto& q : queries) {
    if (q.size() != 2) throw std::invalid_argument("build_adversary_d2: query points must be two-dimensional");
  }
  const double threshold = adversary_slope_threshold(2);
  const double L = slope_boost.value_or(2.0 * threshold);
  if (!(L > threshold)) throw std::invalid_argument("build_adversary_d2: slope must exceed the threshold");

  AdversaryD2 adv;
  adv.queries = queries;
  adv.slope_boost = L;
  const std::size_t n = queries.size();
  for (int j = adversary_level(2, n);; ++j) {
    const auto n3 = pow3(j);
    const auto mid = (n3 - 1) / 2;
    const double s = static_cast<double>(n3);
    adv.hyperplane_cells.clear();
    adv.tilde_cells.clear();
    for (std::int64_t i = 0; i < n3; ++i) {
      adv.hyperplane_cells.push_back(i);
      const bool hit = std::any_of(queries.begin(), queries.end(), [&](const Point& q) {
        return in_closed(q[0] * s, static_cast<double>(mid) - kContainTol, static_cast<double>(mid + 1) + kContainTol) &&
               in_closed(q[1] * s, static_cast<double>(i) - kContainTol, static_cast<double>(i + 1) + kContainTol);
      });
      if (!hit) adv.tilde_cells.push_back(i);
    }
    if (adv.tilde_cells.size() >= 2 * n) {
      adv.level = j;
      break;
    }
  }
  adv.gap_constant = adversary_gap_constant(2);
  adv.claimed_gap = adv.gap_constant / static_cast<double>(n);

  const auto n3 = pow3(adv.level);
  const auto mid = (n3 - 1) / 2;
  std::vector<char> mask(static_cast<std::size_t>(n3), 0);
  for (auto i : adv.tilde_cells) mask[static_cast<std::size_t>(i)] = 1;
  adv.f_bar = [](std::span<const double> x) { return x[0]; };
  adv.f_tilde = [n3, mid, mask, L](std::span<const double> x) {
    const double s = static_cast<double>(n3);
    const auto i0 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(x[0] * s)), 0, n3 - 1);
    if (i0 != mid) return x[0];
    const auto i1 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(x[1] * s)), 0, n3 - 1);
    if (!mask[static_cast<std::size_t>(i1)]) return x[0];
    const double u0 = x[0] * s - static_cast<double>(i0);
    const double u1 = x[1] * s - static_cast<double>(i1);
    const double dist = std::max(0.0, std::min({u0, 1.0 - u0, u1, 1.0 - u1})) / s;
    return x[0] + L * dist;
  };
  return adv;
}

double adversary_d1_constant(double rho, double slope_boost) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("adversary: rho must lie in (0,1)");
  if (!(slope_boost > (1.0 + rho) / (1.0 - rho))) {
    throw std::invalid_argument("adversary: slope must exceed (1 + rho) / (1 - rho)");
  }
  const double L = slope_boost;
  const double a = ((L + 1.0) * (1.0 - rho) - 2.0) / (2.0 * rho * (L + 5.0));
  const double b = (L - 1.0) / (2.0 * (L + 3.0));
  return std::min(a, b) * (1.0 - 1e-6);
}

AdversaryD1 build_adversary_d1(const std::vector<double>& queries, double rho, double slope_boost,
                               std::optional<std::size_t> choose) {
  if (queries.empty()) throw std::invalid_argument("build_adversary_d1: need at least one query point");
  AdversaryD1 adv;
  adv.gap_constant = adversary_d1_constant(rho, slope_boost);
  adv.queries = queries;
  adv.rho = rho;
  adv.slope_boost = slope_boost;
  const std::size_t n = queries.size();
  for (std::size_t j = 1; j <= n; ++j) {
    const double prev = std::pow(rho, static_cast<double>(j - 1));
    const double cur = std::pow(rho, static_cast<double>(j));
    adv.candidates.push_back({{0.5 * (1.0 - prev), 0.5 * (1.0 - cur)}, {0.5 * (1.0 + cur), 0.5 * (1.0 + prev)}});
  }
  const double last = std::pow(rho, static_cast<double>(n));
  adv.candidates.push_back({{0.5 * (1.0 - last), 0.5 * (1.0 + last)}});

  for (std::size_t c = 0; c < adv.candidates.size(); ++c) {
    const bool hit = std::any_of(queries.begin(), queries.end(), [&](double q) {
      return std::any_of(adv.candidates[c].begin(), adv.candidates[c].end(),
                         [q](const Interval& iv) { return in_closed(q, iv.lo, iv.hi); });
    });
    if (!hit) adv.free_candidates.push_back(c);
  }
  if (adv.free_candidates.empty()) throw std::logic_error("build_adversary_d1: every candidate interval is queried");
  if (choose) {
    if (std::find(adv.free_candidates.begin(), adv.free_candidates.end(), *choose) == adv.free_candidates.end()) {
      throw std::invalid_argument("build_adversary_d1: chosen interval contains a query point");
    }
    adv.chosen = *choose;
  } else {
    auto length = [&](std::size_t c) {
      double s = 0.0;
      for (const auto& iv : adv.candidates[c]) s += iv.hi - iv.lo;
      return s;
    };
    adv.chosen = adv.free_candidates.front();
    for (auto c : adv.free_candidates) {
      if (length(c) <= length(adv.chosen)) adv.chosen = c;
    }
  }
  adv.claimed_gap = adv.gap_constant * last;

  const auto pieces = adv.candidates[adv.chosen];
  const double L = slope_boost;
  adv.f_bar = [](std::span<const double> x) { return x[0]; };
  adv.f_tilde = [pieces, L](std::span<const double> x) {
    const double v = x[0];
    for (const auto& iv : pieces) {
      if (v > iv.lo && v < iv.hi) return v + L * std::min(v - iv.lo, iv.hi - v);
    }
    return v;
  };
  return adv;
}

SeparationReport verify_separation(const Evaluator& f_bar, const Evaluator& f_tilde, const std::vector<Point>& queries,
                                   double claimed_gap, std::size_t d, std::int64_t resolution,
                                   std::optional<double> q_bar_exact) {
  SeparationReport rep;
  rep.n = queries.size();
  rep.claimed_gap = claimed_gap;
  for (const auto& q : queries) rep.max_residual = std::max(rep.max_residual, std::fabs(f_tilde(q) - f_bar(q)));
  rep.agreement = rep.max_residual == 0.0;
  const auto m = ProductMeasure::uniform(d);
  rep.q_bar = q_bar_exact ? *q_bar_exact : brute_force_quantile(f_bar, m, 0.5, resolution);
  rep.q_tilde = brute_force_quantile(f_tilde, m, 0.5, resolution);
  rep.measured_gap = rep.q_tilde - rep.q_bar;
  rep.gap_ok = rep.measured_gap >= claimed_gap;
  rep.estimator_lower_bound = 0.5 * std::fabs(rep.measured_gap);
  return rep;
}

std::vector<Point> adversary_queries(std::size_t d, std::size_t n, const std::string& layout, std::uint64_t seed) {
  if (d < 1 || d > 2) throw std::invalid_argument("adversary_queries: d must be 1 or 2");
  std::vector<Point> out;
  if (n == 0) return out;
  if (layout == "random") {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      Point p(d);
      for (auto& v : p) v = unit_uniform(rng);
      out.push_back(p);
    }
    return out;
  }
  if (layout == "algorithm") {
    KnownOptions opts;
    opts.keep_query_points = true;
    const Evaluator f_bar = [](std::span<const double> x) { return x[0]; };
    auto run = run_known(f_bar, 1.0, ProductMeasure::uniform(d), 0.5, static_cast<std::int64_t>(n), opts);
    return run.query_points;
  }
  if (layout != "column" && layout != "spread") throw std::invalid_argument("adversary_queries: unknown layout " + layout);
  if (d == 2) {
    const auto n3 = pow3(adversary_level(2, n));
    const auto mid = (n3 - 1) / 2;
    const double den = 2.0 * static_cast<double>(n3);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back({static_cast<double>(2 * mid + 1) / den, static_cast<double>(2 * i + 1) / den});
    }
    return out;
  }
  // Midpoints of I_{N+1} and of the left pieces of I_1..I_{N-1}, leaving I_N free (rho = 1/2).
  out.push_back({0.5});
  for (std::size_t j = 1; j < n; ++j) {
    const double prev = std::pow(0.5, static_cast<double>(j - 1));
    const double cur = std::pow(0.5, static_cast<double>(j));
    out.push_back({0.25 * ((1.0 - prev) + (1.0 - cur))});
  }
  return out;
}

}  // namespace lipquant
