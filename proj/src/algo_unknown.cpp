#include "lipquant/algo_unknown.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace lipquant {

std::int64_t candidate_budget(int j, std::int64_t N) {
  if (j < 0) throw std::invalid_argument("candidate_budget: negative candidate");
  if (N < 0) throw std::invalid_argument("candidate_budget: negative budget");
  const long double pi = std::numbers::pi_v<long double>;
  const long double jj = static_cast<long double>(j) + 1.0L;
  return static_cast<std::int64_t>(std::floor(6.0L * static_cast<long double>(N) / (pi * pi * jj * jj)));
}

int j_max(std::int64_t N) {
  if (N < 2) throw std::invalid_argument("j_max: budget must be at least 2");
  int j = 0;
  while (candidate_budget(j + 1, N) >= 1) ++j;
  return j;
}

int j_max_closed_form(std::int64_t N) {
  if (N < 2) throw std::invalid_argument("j_max_closed_form: budget must be at least 2");
  return static_cast<int>(std::floor(std::sqrt(6.0 * static_cast<double>(N)) / std::numbers::pi)) - 1;
}

double candidate_lipschitz(int j) {
  if (j < 0) throw std::invalid_argument("candidate_lipschitz: negative candidate");
  double L = 1.0;
  for (int i = 0; i < j; ++i) L *= 3.0;
  return L;
}

std::vector<CandidateSchedule> candidate_schedule(std::int64_t N) {
  std::vector<CandidateSchedule> out;
  const int jm = j_max(N);
  for (int j = 0; j <= jm; ++j) out.push_back({j, candidate_lipschitz(j), candidate_budget(j, N), true});
  return out;
}

namespace {

std::vector<MultiIndex> center_children(const ActiveSet& s) {
  std::vector<MultiIndex> out;
  out.reserve(s.indices.size());
  for (const auto& b : s.indices) out.push_back(center_child(b));
  return out;
}

}  // namespace

UnknownRun run_unknown(const Evaluator& f, const ProductMeasure& m, double alpha, std::int64_t N,
                       const UnknownOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("run_unknown: alpha must lie in (0,1)");
  if (N < 2) throw std::invalid_argument("run_unknown: budget must be at least 2");
  if (opts.max_level < 0 || opts.max_level >= kMaxGridLevel) {
    throw std::invalid_argument("run_unknown: max_level must lie in [0, " + std::to_string(kMaxGridLevel) + ")");
  }
  const std::size_t d = m.dim();
  const std::int64_t fresh_per_survivor = pow3(static_cast<int>(d)) - 1;

  UnknownRun run;
  run.budget = N;
  run.j_max = j_max(N);
  run.j_max_closed_form = j_max_closed_form(N);
  const auto ncand = static_cast<std::size_t>(run.j_max + 1);

  std::vector<ActiveSet> sets(ncand, ActiveSet{0, {root_index(d)}});
  std::vector<bool> live(ncand, true);
  for (int j = 0; j <= run.j_max; ++j) {
    run.candidates.push_back({j, candidate_lipschitz(j), candidate_budget(j, N), 1, 1, std::nullopt, 1});
  }

  using ValueMap = std::unordered_map<MultiIndex, double, MultiIndexHash>;
  ValueMap cur;
  std::vector<MultiIndex> cur_order{root_index(d)};
  cur.emplace(cur_order.front(), f(center(cur_order.front())));
  run.evaluations = 1;
  std::vector<MassPoint> frozen;

  for (int k = 0;; ++k) {
    ValueMassTable table;
    table.reserve(cur_order.size() + frozen.size());
    std::vector<double> active_masses;
    active_masses.reserve(cur_order.size());
    for (const auto& b : cur_order) {
      const double p = cell_probability(m, b);
      active_masses.push_back(p);
      table.add(cur.at(b), p, Origin::eligible);
    }
    std::vector<double> frozen_masses;
    frozen_masses.reserve(frozen.size());
    for (const auto& p : frozen) frozen_masses.push_back(p.mass);
    table.append(frozen);
    const double est = weighted_quantile_sup(table, alpha);

    UnknownLevelRecord rec;
    rec.level = k;
    rec.estimate = est;
    rec.estimate_inf = weighted_quantile_inf(table, alpha);
    rec.union_size = cur_order.size();
    rec.live = static_cast<std::size_t>(std::count(live.begin(), live.end(), true));
    rec.evaluations = run.evaluations;
    rec.active_mass = compensated_sum(active_masses);
    rec.frozen_mass = compensated_sum(frozen_masses);
    rec.total_mass = table.total_mass();
    for (std::size_t j = 0; j < ncand; ++j) {
      rec.candidate_sizes.push_back(sets[j].indices.size());
      rec.candidate_live.push_back(live[j]);
    }
    run.trace.push_back(std::move(rec));
    run.estimate = est;
    run.level = k;
    if (opts.keep_active_sets) run.active_sets.push_back(sets);

    if (k >= opts.max_level) {
      run.level_capped = true;
      break;
    }

    std::vector<std::vector<MultiIndex>> next(ncand);
    for (std::size_t j = 0; j < ncand; ++j) {
      auto& rep = run.candidates[j];
      if (live[j]) {
        std::vector<double> vals;
        vals.reserve(sets[j].indices.size());
        for (const auto& b : sets[j].indices) vals.push_back(cur.at(b));
        auto pr = prune(sets[j], vals, est, rep.lipschitz, m);
        rep.n_calls += fresh_per_survivor * static_cast<std::int64_t>(pr.survivors.size());
        if (rep.n_calls > rep.budget) {
          live[j] = false;
          rep.retired_at = k;
        } else {
          rep.spent = rep.n_calls;
          next[j] = std::move(pr.next.indices);
          continue;
        }
      }
      next[j] = center_children(sets[j]);
    }
    if (std::none_of(live.begin(), live.end(), [](bool b) { return b; })) break;

    ValueMap nxt;
    std::vector<MultiIndex> nxt_order;
    for (std::size_t j = 0; j < ncand; ++j) {
      for (const auto& g : next[j]) {
        if (nxt.count(g) != 0) continue;
        double v;
        if (is_center_child(g)) {
          v = cur.at(parent_l(g, 1));
        } else {
          v = f(center(g));
          ++run.evaluations;
        }
        nxt.emplace(g, v);
        nxt_order.push_back(g);
      }
    }
    for (const auto& p : cur_order) {
      const auto kids = children(p);
      std::size_t kept = 0;
      for (const auto& c : kids) kept += nxt.count(c);
      if (kept == kids.size()) continue;
      double mass;
      if (kept == 0) {
        mass = cell_probability(m, p);
      } else {
        std::vector<double> ms;
        for (const auto& c : kids) {
          if (nxt.count(c) == 0) ms.push_back(cell_probability(m, c));
        }
        mass = compensated_sum(ms);
      }
      frozen.push_back({cur.at(p), mass, Origin::frozen});
    }
    for (std::size_t j = 0; j < ncand; ++j) sets[j] = ActiveSet{k + 1, std::move(next[j])};
    cur = std::move(nxt);
    cur_order = std::move(nxt_order);
  }
  for (std::size_t j = 0; j < ncand; ++j) run.candidates[j].final_active_size = sets[j].indices.size();
  return run;
}

int retirement_level(const UnknownRun& run, int j) {
  if (j < 0 || j > run.j_max) return 0;
  const auto& rep = run.candidates.at(static_cast<std::size_t>(j));
  return rep.retired_at ? *rep.retired_at : run.level;
}

int standalone_level(const Evaluator& f, const ProductMeasure& m, double alpha, std::int64_t N, int j,
                     int max_level) {
  const auto budget = candidate_budget(j, N);
  if (budget < 1) return 0;
  KnownOptions opts;
  opts.max_level = max_level;
  return run_known(f, candidate_lipschitz(j), m, alpha, budget, opts).bracket.level;
}

int best_candidate(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("best_candidate: L must be positive");
  int j = 0;
  while (candidate_lipschitz(j) < L) ++j;
  return j;
}

bool unknown_error_bound_check(const UnknownRun& run, double true_q, double L_true, std::size_t d) {
  const int js = best_candidate(L_true);
  const int k = std::min(run.level, retirement_level(run, js));
  const double bound = 4.0 * candidate_lipschitz(js) * half_radius(k, d);
  return std::fabs(run.estimate - true_q) <= bound;
}

}  // namespace lipquant
