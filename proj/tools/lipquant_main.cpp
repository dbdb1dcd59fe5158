// lipquant: budgeted deterministic quantile brackets for Lipschitz functions.
//
//   lipquant run --problem paper_d1 --algo known --budgets 10:500:10 --out d1.csv
//   lipquant adversary --dim 2 --n 3,9,27
//   lipquant oracle --problem paper_d2

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lipquant/experiment.hpp"

using namespace lipquant;

namespace {

struct Flags {
  std::string config;
  std::string problem;
  std::string algo;
  std::string budgets;
  std::string out;
  std::optional<double> alpha;
  std::optional<double> lipschitz;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> resolution;
  std::optional<int> max_level;
  std::optional<unsigned> threads;
};

void add_problem_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key = value config file; flags override it");
  app->add_option("--problem", f.problem, "paper_d1 | paper_d2 | linear_d1 | custom");
  app->add_option("--alpha", f.alpha, "quantile level in (0,1)");
  app->add_option("--lipschitz", f.lipschitz, "Lipschitz constant to use instead of the built-in one");
  app->add_option("--resolution", f.resolution, "oracle grid resolution (0 = default)");
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  if (!f.problem.empty()) apply_setting(cfg, "problem", f.problem);
  if (!f.algo.empty()) apply_setting(cfg, "algo", f.algo);
  if (!f.budgets.empty()) apply_setting(cfg, "budgets", f.budgets);
  if (!f.out.empty()) cfg.output = f.out;
  if (f.alpha) apply_setting(cfg, "alpha", format_double(*f.alpha));
  if (f.lipschitz) apply_setting(cfg, "lipschitz", format_double(*f.lipschitz));
  if (f.seed) cfg.seed = *f.seed;
  if (f.resolution) apply_setting(cfg, "resolution", std::to_string(*f.resolution));
  if (f.max_level) apply_setting(cfg, "max_level", std::to_string(*f.max_level));
  if (f.threads) cfg.threads = *f.threads;
  return cfg;
}

int cmd_run(const Flags& f) {
  const auto cfg = build_config(f);
  const auto res = run_experiment(cfg);
  if (cfg.output.empty() || cfg.output == "-") {
    write_csv(std::cout, res.rows);
    write_summary(std::cerr, res);
  } else {
    std::ofstream out(cfg.output);
    if (!out) throw ConfigError("cannot write '" + cfg.output + "'");
    write_csv(out, res.rows);
    write_summary(std::cout, res);
  }
  return 0;
}

int cmd_oracle(const Flags& f) {
  const auto cfg = build_config(f);
  const auto p = resolve_problem(cfg);
  std::cout << "problem " << p.name << " (d=" << p.d << ", alpha=" << format_double(p.alpha) << ")\n";
  std::cout << "lipschitz " << format_double(p.lipschitz) << '\n';
  if (p.analytic_quantile) std::cout << "analytic quantile " << format_double(*p.analytic_quantile) << '\n';
  if (p.d > 2) {
    std::cout << "no numeric oracle above d = 2\n";
    return 0;
  }
  const double q = reference_quantile(p);
  std::cout << "reference quantile " << format_double(q) << '\n';
  const auto res = cfg.resolution != 0 ? cfg.resolution : (p.d == 1 ? 1000000 : 2000);
  std::cout << "brute-force quantile " << format_double(brute_force_quantile(p, res)) << " (grid " << res << ")\n";
  std::cout << "grid slope estimate " << format_double(estimate_lipschitz(p.f, p.d, p.d == 1 ? 1000000 : 2000))
            << '\n';
  const auto ls = estimate_level_set_M(p, q, cfg.resolution);
  std::cout << "level-set M " << format_double(ls.M) << " (worst delta " << format_double(ls.worst_delta) << ")\n";
  for (const auto& [delta, ratio] : ls.ratios) {
    std::cout << "  delta " << format_double(delta) << " ratio " << format_double(ratio) << '\n';
  }
  if (!ls.assumption_holds) std::cout << "warning: band volume does not shrink with delta\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic quantile brackets for Lipschitz functions under a fixed evaluation budget"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "sweep budgets and write CSV");
  add_problem_flags(run, run_flags);
  run->add_option("--algo", run_flags.algo, "known | unknown | monte_carlo");
  run->add_option("--budgets", run_flags.budgets, "comma list or start:stop:step");
  run->add_option("--out", run_flags.out, "CSV path (default stdout)");
  run->add_option("--seed", run_flags.seed, "Monte Carlo seed");
  run->add_option("--max-level", run_flags.max_level, "refinement level cap");
  run->add_option("--threads", run_flags.threads, "worker threads (0 = all cores)");

  Flags oracle_flags;
  auto* oracle = app.add_subcommand("oracle", "print reference quantile and problem constants");
  add_problem_flags(oracle, oracle_flags);

  std::size_t adv_dim = 2;
  std::string adv_ns;
  std::string adv_layout = "column";
  std::int64_t adv_res = 0;
  std::uint64_t adv_seed = 7;
  auto* adv = app.add_subcommand("adversary", "check the lower-bound construction");
  adv->add_option("--dim", adv_dim, "1 or 2");
  adv->add_option("--n", adv_ns, "query counts, comma list or start:stop:step");
  adv->add_option("--layout", adv_layout, "column | spread | random | algorithm");
  adv->add_option("--resolution", adv_res, "oracle grid resolution (0 = default)");
  adv->add_option("--seed", adv_seed, "seed for the random layout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*oracle) return cmd_oracle(oracle_flags);
    std::vector<std::size_t> ns;
    if (!adv_ns.empty()) {
      for (auto n : parse_budgets(adv_ns)) ns.push_back(static_cast<std::size_t>(n));
    }
    const auto rows = adversary_report(adv_dim, ns, adv_layout, adv_res, adv_seed);
    write_adversary_table(std::cout, rows);
    for (const auto& r : rows) {
      if (!r.pass) return 3;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
