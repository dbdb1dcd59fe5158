#include "lipquant/algo_known.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lipquant {

double FrozenMass::total() const {
  std::vector<double> m;
  m.reserve(points.size());
  for (const auto& p : points) m.push_back(p.mass);
  return compensated_sum(m);
}

PruneResult prune(const ActiveSet& active, std::span<const double> values, double estimate, double L,
                  const ProductMeasure& m) {
  if (values.size() != active.indices.size()) throw std::invalid_argument("prune: one value per active index");
  if (active.indices.empty()) throw std::invalid_argument("prune: empty active set");
  const double band = 2.0 * L * half_radius(active.level, active.indices.front().dim());
  const double lo = estimate - band;
  const double hi = estimate + band;
  PruneResult out;
  out.next.level = active.level + 1;
  for (std::size_t i = 0; i < active.indices.size(); ++i) {
    const double v = values[i];
    if (v >= lo && v <= hi) {
      out.survivors.push_back(i);
      for (auto& c : children(active.indices[i])) out.next.indices.push_back(std::move(c));
    } else {
      out.frozen.points.push_back({v, cell_probability(m, active.indices[i]), Origin::frozen});
    }
  }
  return out;
}

KnownRun run_known(const Evaluator& f, double L, const ProductMeasure& m, double alpha, std::int64_t N,
                   const KnownOptions& opts) {
  if (!(L > 0.0)) throw std::invalid_argument("run_known: L must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("run_known: alpha must lie in (0,1)");
  if (N < 1) throw std::invalid_argument("run_known: budget must be at least 1");
  if (opts.max_level < 0 || opts.max_level >= kMaxGridLevel) {
    throw std::invalid_argument("run_known: max_level must lie in [0, " + std::to_string(kMaxGridLevel) + ")");
  }
  const std::size_t d = m.dim();
  const std::int64_t fresh_per_survivor = pow3(static_cast<int>(d)) - 1;

  KnownRun run;
  run.lipschitz = L;
  run.ledger.n_budget = N;
  run.ledger.n_calls = 1;
  run.ledger.history.push_back(1);

  ActiveSet active{0, {root_index(d)}};
  std::vector<double> values;
  std::int64_t evals = 0;
  auto evaluate = [&](const MultiIndex& b) {
    auto x = center(b);
    ++evals;
    const double v = f(x);
    if (opts.keep_query_points) run.query_points.push_back(std::move(x));
    return v;
  };
  values.push_back(evaluate(active.indices.front()));
  FrozenMass frozen;

  for (;;) {
    const int k = active.level;
    ValueMassTable table;
    table.reserve(active.indices.size() + frozen.points.size());
    std::vector<double> active_masses;
    active_masses.reserve(active.indices.size());
    for (std::size_t i = 0; i < active.indices.size(); ++i) {
      const double p = cell_probability(m, active.indices[i]);
      active_masses.push_back(p);
      table.add(values[i], p, Origin::eligible);
    }
    table.append(frozen.points);
    const double est = weighted_quantile_sup(table, alpha);
    const double hw = L * half_radius(k, d);

    LevelRecord rec;
    rec.level = k;
    rec.estimate = est;
    rec.estimate_inf = weighted_quantile_inf(table, alpha);
    rec.active = active.indices.size();
    rec.calls = run.ledger.n_calls;
    rec.evaluations = evals;
    rec.active_mass = compensated_sum(active_masses);
    rec.frozen_mass = frozen.total();
    rec.total_mass = table.total_mass();
    run.bracket = QuantileBracket{est, est - hw, est + hw, k, run.ledger.n_calls, evals};
    if (opts.keep_active_sets) run.active_sets.push_back(active);

    if (k >= opts.max_level) {
      run.level_capped = true;
      run.trace.push_back(rec);
      break;
    }
    auto pr = prune(active, values, est, L, m);
    if (pr.survivors.empty()) throw std::logic_error("run_known: estimate fell outside its own band");
    rec.survivors = pr.survivors.size();
    run.trace.push_back(rec);

    const std::int64_t charge = fresh_per_survivor * static_cast<std::int64_t>(pr.survivors.size());
    if (run.ledger.n_calls + charge > N) break;
    run.ledger.n_calls += charge;
    run.ledger.history.push_back(run.ledger.n_calls);

    frozen.points.insert(frozen.points.end(), pr.frozen.points.begin(), pr.frozen.points.end());
    std::vector<double> next_values;
    next_values.reserve(pr.next.indices.size());
    for (std::size_t i = 0; i < pr.next.indices.size(); ++i) {
      const auto& c = pr.next.indices[i];
      if (is_center_child(c)) {
        next_values.push_back(values[pr.survivors[i / static_cast<std::size_t>(fresh_per_survivor + 1)]]);
      } else {
        next_values.push_back(evaluate(c));
      }
    }
    active = std::move(pr.next);
    values = std::move(next_values);
  }
  return run;
}

double full_grid_estimate(const Evaluator& f, const ProductMeasure& m, double alpha, int k) {
  if (k < 0) throw std::invalid_argument("full_grid_estimate: negative level");
  const double cells = std::pow(3.0, static_cast<double>(k) * static_cast<double>(m.dim()));
  if (cells > 1e6) throw std::length_error("full_grid_estimate: more than 1e6 cells");
  ValueMassTable table;
  for (const auto& b : level_cells(m.dim(), k)) {
    table.add(f(center(b)), cell_probability(m, b), Origin::eligible);
  }
  return weighted_quantile_sup(table, alpha);
}

}  // namespace lipquant
