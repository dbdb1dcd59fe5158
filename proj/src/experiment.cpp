#include "lipquant/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "lipquant/algo_unknown.hpp"
#include "lipquant/bounds.hpp"

namespace lipquant {

ConfigError::ConfigError(const std::string& msg, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x)) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t x = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not an integer: '" + v + "'");
  return x;
}

Marginal parse_marginal(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1 && parts[0] == "uniform") return uniform_marginal();
  if (parts.size() == 3 && parts[0] == "truncnorm") {
    const double mu = to_double("measure", parts[1]);
    const double sigma = to_double("measure", parts[2]);
    if (!(sigma > 0.0)) throw ConfigError("measure: sigma must be positive");
    return truncated_normal_marginal(mu, sigma);
  }
  throw ConfigError("measure: expected 'uniform' or 'truncnorm:mu:sigma', got '" + spec + "'");
}

}  // namespace

Algorithm parse_algorithm(const std::string& s) {
  if (s == "known") return Algorithm::known;
  if (s == "unknown") return Algorithm::unknown;
  if (s == "monte_carlo" || s == "mc") return Algorithm::monte_carlo;
  throw ConfigError("unknown algorithm '" + s + "' (known | unknown | monte_carlo)");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::known: return "known";
    case Algorithm::unknown: return "unknown";
    case Algorithm::monte_carlo: return "monte_carlo";
  }
  return "?";
}

std::vector<std::int64_t> parse_budgets(const std::string& s) {
  std::vector<std::int64_t> out;
  const std::string t = trim(s);
  if (t.empty()) throw ConfigError("budgets: empty list");
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("budgets: range must be start:stop:step");
    const auto a = to_int("budgets", parts[0]);
    const auto b = to_int("budgets", parts[1]);
    const auto step = to_int("budgets", parts[2]);
    if (step <= 0) throw ConfigError("budgets: step must be positive");
    for (auto n = a; n <= b; n += step) out.push_back(n);
  } else {
    for (const auto& p : split(t, ',')) out.push_back(to_int("budgets", p));
  }
  if (out.empty()) throw ConfigError("budgets: empty list");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1) throw ConfigError("budgets: every budget must be at least 1");
    if (i > 0 && out[i] <= out[i - 1]) throw ConfigError("budgets: must be strictly increasing");
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "problem") {
    cfg.problem = v;
  } else if (key == "algo" || key == "algorithm") {
    cfg.algorithm = parse_algorithm(v);
  } else if (key == "alpha") {
    const double a = to_double(key, v);
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    cfg.alpha = a;
  } else if (key == "lipschitz") {
    const double L = to_double(key, v);
    if (!(L > 0.0)) throw ConfigError("lipschitz must be positive");
    cfg.lipschitz_override = L;
  } else if (key == "budgets") {
    cfg.budgets = parse_budgets(v);
  } else if (key == "out" || key == "output") {
    cfg.output = v;
  } else if (key == "seed") {
    const auto s = to_int(key, v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "resolution") {
    const auto r = to_int(key, v);
    if (r < 0) throw ConfigError("resolution must be non-negative");
    cfg.resolution = r;
  } else if (key == "max_level") {
    const auto k = to_int(key, v);
    if (k < 0 || k >= kMaxGridLevel) throw ConfigError("max_level out of range");
    cfg.max_level = static_cast<int>(k);
  } else if (key == "threads") {
    const auto t = to_int(key, v);
    if (t < 0) throw ConfigError("threads must be non-negative");
    cfg.threads = static_cast<unsigned>(t);
  } else if (key == "dimension") {
    const auto d = to_int(key, v);
    if (d < 1 || d > 3) throw ConfigError("dimension must be 1, 2 or 3");
    cfg.dimension = static_cast<std::size_t>(d);
  } else if (key == "function") {
    cfg.function = v;
  } else if (key == "measure") {
    cfg.measure = split(v, ',');
  } else if (key == "domain") {
    cfg.domain = split(v, ',');
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    try {
      apply_setting(base, key, s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line);
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

TestProblem resolve_problem(const ExperimentConfig& cfg) {
  TestProblem p;
  if (cfg.problem == "paper_d1") {
    p = paper_f_d1();
  } else if (cfg.problem == "paper_d2") {
    p = paper_f_d2(cfg.alpha.value_or(0.999));
  } else if (cfg.problem == "linear_d1") {
    p = linear_d1(cfg.alpha.value_or(0.5));
  } else if (cfg.problem == "custom") {
    const std::size_t d = cfg.dimension;
    if (d == 0) throw ConfigError("custom problem needs 'dimension'");
    p.name = "custom";
    p.d = d;
    if (cfg.function == "sum") {
      p.f = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
      };
      p.lipschitz = std::sqrt(static_cast<double>(d));
    } else if (cfg.function == "first") {
      p.f = [](std::span<const double> x) { return x[0]; };
      p.lipschitz = 1.0;
    } else if (cfg.function == "distance") {
      p.f = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += (v - 0.5) * (v - 0.5);
        return std::sqrt(s);
      };
      p.lipschitz = 1.0;
    } else if (cfg.function == "paper_d1") {
      if (d != 1) throw ConfigError("function paper_d1 needs dimension 1");
      p.f = [](std::span<const double> x) { return paper_function_d1(x[0]); };
      p.lipschitz = 1.61;
    } else {
      throw ConfigError("unknown function '" + cfg.function + "' (sum | first | distance | paper_d1)");
    }
    std::vector<Marginal> ms;
    if (cfg.measure.empty()) {
      ms.assign(d, uniform_marginal());
    } else if (cfg.measure.size() == 1) {
      ms.assign(d, parse_marginal(cfg.measure.front()));
    } else if (cfg.measure.size() == d) {
      for (const auto& s : cfg.measure) ms.push_back(parse_marginal(s));
    } else {
      throw ConfigError("measure: give one entry or one per axis");
    }
    p.measure = ProductMeasure(std::move(ms));
    p.alpha = cfg.alpha.value_or(0.5);
    if (!cfg.domain.empty()) {
      if (cfg.domain.size() != d) throw ConfigError("domain: one 'lo:hi' entry per axis");
      BoxDomain box;
      for (const auto& s : cfg.domain) {
        const auto parts = split(s, ':');
        if (parts.size() != 2) throw ConfigError("domain: expected 'lo:hi', got '" + s + "'");
        box.lower.push_back(to_double("domain", parts[0]));
        box.upper.push_back(to_double("domain", parts[1]));
        if (!(box.upper.back() > box.lower.back())) throw ConfigError("domain: empty side '" + s + "'");
      }
      auto r = rescale_problem(box, p.f);
      p.f = r.g;
      p.lipschitz *= r.c1;
    }
  } else {
    throw ConfigError("unknown problem '" + cfg.problem + "' (paper_d1 | paper_d2 | linear_d1 | custom)");
  }
  if (cfg.alpha && cfg.problem == "paper_d1") p.alpha = *cfg.alpha;
  if (cfg.lipschitz_override) p.lipschitz = *cfg.lipschitz_override;
  return p;
}

SlopeFit fit_slope(const std::vector<ResultRow>& rows, FitMode mode) {
  SlopeFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    if (!r.abs_error) continue;
    if (r.level_capped) {
      fit.excluded_capped.push_back(r.n);
      continue;
    }
    if (!(*r.abs_error > 0.0)) {
      fit.excluded_zero.push_back(r.n);
      continue;
    }
    const auto n = static_cast<double>(r.n);
    xs.push_back(mode == FitMode::semilog ? n : std::log(n));
    ys.push_back(std::log(*r.abs_error));
  }
  if (xs.size() < 3) throw std::invalid_argument("fit_slope: fewer than 3 usable rows");
  const double k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_slope: all usable rows share one abscissa");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.used = xs.size();
  return fit;
}

ProblemConstantsEstimate problem_constants(const TestProblem& p, double true_q, std::int64_t resolution) {
  ProblemConstantsEstimate c;
  c.L = p.lipschitz;
  if (p.d <= 2) {
    const auto ls = estimate_level_set_M(p, true_q, resolution);
    c.M = ls.M;
    c.M_resolution = ls.resolution;
  }
  return c;
}

namespace {

ResultRow run_row(const TestProblem& p, const ExperimentConfig& cfg, std::int64_t n,
                  const std::optional<double>& true_q, const std::optional<ProblemConstants>& inflated) {
  ResultRow row;
  row.n = n;
  if (cfg.algorithm == Algorithm::known) {
    KnownOptions opts;
    opts.max_level = cfg.max_level;
    const auto run = run_known(p.f, p.lipschitz, p.measure, p.alpha, n, opts);
    row.estimate = run.bracket.estimate;
    row.lower = run.bracket.lower;
    row.upper = run.bracket.upper;
    row.level = run.bracket.level;
    row.evals = run.bracket.evaluations;
    row.level_capped = run.level_capped;
    if (inflated && (p.d == 1 || n > 1)) row.bound = known_bound(*inflated, n);
  } else if (cfg.algorithm == Algorithm::unknown) {
    if (n < 2) throw ConfigError("the unknown-L algorithm needs budgets of at least 2");
    UnknownOptions opts;
    opts.max_level = cfg.max_level;
    const auto run = run_unknown(p.f, p.measure, p.alpha, n, opts);
    row.estimate = run.estimate;
    row.level = run.level;
    row.evals = run.evaluations;
    row.level_capped = run.level_capped;
    if (inflated && inflated->L >= 1.0 && n >= unknown_bound_min_budget(*inflated)) {
      row.bound = unknown_bound(*inflated, n);
    }
  } else {
    if (n < 100) throw ConfigError("monte_carlo needs budgets of at least 100 samples");
    const auto mc = monte_carlo_quantile(p, n, cfg.seed);
    row.estimate = mc.estimate;
    row.evals = n;
  }
  if (true_q) {
    row.true_q = *true_q;
    row.abs_error = std::fabs(row.estimate - *true_q);
  }
  return row;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.budgets.empty()) throw ConfigError("no budgets given");
  const TestProblem p = resolve_problem(cfg);
  ExperimentResult res;
  res.problem = p.name;
  res.algorithm = cfg.algorithm;
  res.d = p.d;
  res.alpha = p.alpha;
  res.lipschitz = p.lipschitz;
  if (p.d <= 2) res.true_q = reference_quantile(p);

  std::optional<ProblemConstants> inflated;
  if (res.true_q && cfg.algorithm != Algorithm::monte_carlo) {
    res.constants = problem_constants(p, *res.true_q, cfg.resolution);
    if (res.constants->M > 0.0) {
      inflated = ProblemConstants{p.d, kBoundInflation * res.constants->L, kBoundInflation * res.constants->M, p.alpha};
    }
  }

  res.rows.resize(cfg.budgets.size());
  unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cfg.budgets.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = next++; i < cfg.budgets.size(); i = next++) {
        res.rows[i] = run_row(p, cfg, cfg.budgets[i], res.true_q, inflated);
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next = cfg.budgets.size();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (res.true_q) {
    try {
      res.fit = fit_slope(res.rows, p.d == 1 ? FitMode::semilog : FitMode::loglog);
    } catch (const std::invalid_argument& e) {
      res.fit_error = e.what();
    }
  }
  return res;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

namespace {

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) return format_double(*v);
  else return std::to_string(*v);
}

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "n,estimate,lower,upper,level,evals,true_q,abs_error,bound\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.estimate) << ',' << opt(r.lower) << ',' << opt(r.upper) << ','
        << opt(r.level) << ',' << r.evals << ',' << opt(r.true_q) << ',' << opt(r.abs_error) << ','
        << opt(r.bound) << '\n';
  }
}

void write_summary(std::ostream& out, const ExperimentResult& res) {
  out << "problem " << res.problem << " (d=" << res.d << ", alpha=" << format_double(res.alpha) << ")\n";
  out << "algorithm " << to_string(res.algorithm);
  if (res.algorithm == Algorithm::known) out << " with L=" << format_double(res.lipschitz);
  out << '\n';
  if (res.true_q) out << "reference quantile " << format_double(*res.true_q) << '\n';
  if (res.constants) {
    out << "level-set constant M=" << format_double(res.constants->M) << " (grid " << res.constants->M_resolution
        << "), bounds use L and M inflated x" << format_double(kBoundInflation) << '\n';
  }
  if (res.fit) {
    const bool semi = res.d == 1;
    out << (semi ? "semilog" : "loglog") << " fit: slope " << format_double(res.fit->slope) << ", intercept "
        << format_double(res.fit->intercept) << ", R^2 " << format_double(res.fit->r2) << ", rows " << res.fit->used
        << '\n';
    if (semi) out << "rho_hat " << format_double(std::exp(res.fit->slope)) << '\n';
    if (!res.fit->excluded_zero.empty()) out << "excluded (zero error): " << join(res.fit->excluded_zero) << '\n';
    if (!res.fit->excluded_capped.empty()) {
      out << "excluded (level cap reached): " << join(res.fit->excluded_capped) << '\n';
    }
  } else if (!res.fit_error.empty()) {
    out << "no fit: " << res.fit_error << '\n';
  }
}

std::vector<AdversaryRow> adversary_report(std::size_t d, const std::vector<std::size_t>& ns, const std::string& layout,
                                           std::int64_t resolution, std::uint64_t seed) {
  if (d != 1 && d != 2) throw ConfigError("adversary: dimension must be 1 or 2");
  if (resolution == 0) resolution = d == 2 ? 3000 : 1000000;
  std::vector<AdversaryRow> rows;
  for (auto n : ns) {
    if (n == 0) throw ConfigError("adversary: N must be positive");
    const auto queries = adversary_queries(d, n, layout, seed);
    AdversaryRow row;
    row.n = queries.size();
    SeparationReport rep;
    if (d == 2) {
      const auto adv = build_adversary_d2(queries);
      row.level = adv.level;
      rep = verify_separation(adv.f_bar, adv.f_tilde, queries, adv.claimed_gap, 2, resolution, 0.5);
    } else {
      std::vector<double> q1;
      for (const auto& q : queries) q1.push_back(q[0]);
      const auto adv = build_adversary_d1(q1);
      row.level = static_cast<int>(adv.chosen) + 1;
      rep = verify_separation(adv.f_bar, adv.f_tilde, queries, adv.claimed_gap, 1, resolution, 0.5);
    }
    row.claimed_gap = rep.claimed_gap;
    row.measured_gap = rep.measured_gap;
    row.max_residual = rep.max_residual;
    row.pass = rep.pass();
    rows.push_back(row);
  }
  return rows;
}

void write_adversary_table(std::ostream& out, const std::vector<AdversaryRow>& rows) {
  out << "n,level,claimed_gap,measured_gap,max_residual,pass\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.level << ',' << format_double(r.claimed_gap) << ',' << format_double(r.measured_gap) << ','
        << format_double(r.max_residual) << ',' << (r.pass ? "pass" : "fail") << '\n';
  }
}

}  // namespace lipquant
