#include <cmath>
#include <random>

#include "doctest.h"
#include "lipquant/algo_known.hpp"
#include "lipquant/oracles.hpp"

using namespace lipquant;

namespace {

const Evaluator identity = [](std::span<const double> x) { return x[0]; };
const Evaluator sum2 = [](std::span<const double> x) { return x[0] + x[1]; };

constexpr double kIrwinHall999 = 1.9552786404500042;  // 2 - sqrt(0.002)
constexpr double kD1Quantile = 1.3503386900329626;

}  // namespace

TEST_CASE("prune keeps the closed band") {
  ActiveSet a{1, {MultiIndex{1, {0}}, MultiIndex{1, {1}}, MultiIndex{1, {2}}}};
  const auto m = ProductMeasure::uniform(1);
  const std::vector<double> vals{0.17, 0.5, 0.83};
  auto r = prune(a, vals, 0.5, 1.0, m);
  CHECK(r.survivors.size() == 3);
  CHECK(r.next.indices.size() == 9);
  CHECK(r.next.level == 2);
  CHECK(r.frozen.points.empty());

  // band half-width is exactly 1/3 here; 0.5 + 1/3 sits on the edge
  const std::vector<double> edge{0.5 - 2.0 * half_radius(1, 1), 0.5, 0.5 + 2.0 * half_radius(1, 1)};
  r = prune(a, edge, 0.5, 1.0, m);
  CHECK(r.survivors.size() == 3);

  const std::vector<double> out{0.1, 0.5, 0.9};
  r = prune(a, out, 0.5, 1.0, m);
  CHECK(r.survivors == std::vector<std::size_t>{1});
  CHECK(r.next.indices.size() == 3);
  REQUIRE(r.frozen.points.size() == 2);
  CHECK(r.frozen.total() == doctest::Approx(2.0 / 3.0));
  CHECK(r.frozen.points[0].origin == Origin::frozen);

  CHECK_THROWS(prune(a, std::vector<double>{1.0}, 0.5, 1.0, m));
}

TEST_CASE("full grid estimate") {
  const auto m = ProductMeasure::uniform(1);
  CHECK(full_grid_estimate(identity, m, 0.5, 0) == 0.5);
  // 27 cells; the cell holding 1/2 is [13/27, 14/27)
  CHECK(full_grid_estimate(identity, m, 0.5, 3) == doctest::Approx(27.0 / 54.0).epsilon(1e-15));
  CHECK(full_grid_estimate(identity, m, 0.5, 3) == center(MultiIndex{3, {13}})[0]);
  CHECK_THROWS(full_grid_estimate(sum2, ProductMeasure::uniform(2), 0.5, 7));
}

TEST_CASE("budget 1 stops at the root") {
  const auto run = run_known(identity, 1.0, ProductMeasure::uniform(1), 0.5, 1);
  CHECK(run.bracket.level == 0);
  CHECK(run.bracket.estimate == 0.5);
  CHECK(run.bracket.lower == 0.0);
  CHECK(run.bracket.upper == 1.0);
  CHECK(run.bracket.evaluations == 1);
  CHECK(run.ledger.n_calls == 1);
}

TEST_CASE("identity function converges to the median") {
  const auto run = run_known(identity, 1.0, ProductMeasure::uniform(1), 0.5, 200);
  CHECK(run.bracket.lower <= 0.5);
  CHECK(run.bracket.upper >= 0.5);
  CHECK(run.bracket.upper - run.bracket.lower == doctest::Approx(2.0 * half_radius(run.bracket.level, 1)));
  CHECK(std::fabs(run.bracket.estimate - 0.5) <= half_radius(run.bracket.level, 1));
  CHECK(run.bracket.level >= 10);
  // 1/2 is the center of the middle cell at every level
  for (const auto& rec : run.trace) CHECK(rec.estimate == 0.5);
}

TEST_CASE("constant function") {
  const Evaluator c = [](std::span<const double>) { return 2.5; };
  const auto run = run_known(c, 1.0, ProductMeasure::uniform(2), 0.9, 500);
  for (const auto& rec : run.trace) CHECK(rec.estimate == 2.5);
}

TEST_CASE("irwin-hall bracket") {
  const auto run = run_known(sum2, std::sqrt(2.0), ProductMeasure::uniform(2), 0.999, 2000);
  CHECK(run.bracket.lower <= kIrwinHall999);
  CHECK(run.bracket.upper >= kIrwinHall999);
  CHECK(run.ledger.n_calls <= 2000);
  CHECK(run.bracket.evaluations <= 2000);
}

TEST_CASE("d = 1 test problem bracket") {
  const auto p = paper_f_d1();
  const auto run = run_known(p.f, p.lipschitz, p.measure, p.alpha, 500);
  CHECK(run.bracket.lower <= kD1Quantile);
  CHECK(run.bracket.upper >= kD1Quantile);
}

TEST_CASE("ledger and evaluations") {
  const auto p = paper_f_d2();
  KnownOptions opts;
  opts.keep_query_points = true;
  const auto run = run_known(p.f, p.lipschitz, p.measure, p.alpha, 1000, opts);
  CHECK(run.query_points.size() == static_cast<std::size_t>(run.bracket.evaluations));
  // every center child reuses its parent value, so fresh evaluations equal the ledger
  CHECK(run.bracket.evaluations == run.ledger.n_calls);
  REQUIRE(run.ledger.history.size() == static_cast<std::size_t>(run.bracket.level) + 1);
  for (int k = 1; k <= run.bracket.level; ++k) {
    const auto prev = run.ledger.history[static_cast<std::size_t>(k - 1)];
    CHECK(run.ledger.history[static_cast<std::size_t>(k)] ==
          prev + 8 * static_cast<std::int64_t>(run.trace[static_cast<std::size_t>(k - 1)].survivors));
  }
}

TEST_CASE("level cap") {
  KnownOptions opts;
  opts.max_level = 3;
  const auto run = run_known(identity, 1.0, ProductMeasure::uniform(1), 0.5, 10000, opts);
  CHECK(run.level_capped);
  CHECK(run.bracket.level == 3);
  CHECK_THROWS(run_known(identity, 1.0, ProductMeasure::uniform(1), 0.5, 10, KnownOptions{40}));
}

TEST_CASE("argument errors") {
  const auto m = ProductMeasure::uniform(1);
  CHECK_THROWS(run_known(identity, 0.0, m, 0.5, 10));
  CHECK_THROWS(run_known(identity, 1.0, m, 1.0, 10));
  CHECK_THROWS(run_known(identity, 1.0, m, 0.5, 0));
}

TEST_CASE("pruned estimates match the full grid") {
  for (const auto& p : test_suite()) {
    KnownOptions opts;
    opts.max_level = 4;
    const auto run = run_known(p.f, p.lipschitz, p.measure, p.alpha, 1000000, opts);
    for (const auto& rec : run.trace) {
      CAPTURE(p.name);
      CAPTURE(rec.level);
      CHECK(rec.estimate == full_grid_estimate(p.f, p.measure, p.alpha, rec.level));
    }
  }
}

TEST_CASE("active and frozen mass add to one") {
  for (const auto& p : test_suite()) {
    const auto run = run_known(p.f, p.lipschitz, p.measure, p.alpha, 3000);
    for (const auto& rec : run.trace) CHECK(std::fabs(rec.total_mass - 1.0) <= 1e-10);
  }
}
