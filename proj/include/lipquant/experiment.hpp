#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lipquant/adversary.hpp"
#include "lipquant/algo_known.hpp"
#include "lipquant/oracles.hpp"

namespace lipquant {

enum class Algorithm { known, unknown, monte_carlo };

struct ExperimentConfig {
  std::string problem = "paper_d1";
  Algorithm algorithm = Algorithm::known;
  std::optional<double> alpha;
  std::optional<double> lipschitz_override;
  std::vector<std::int64_t> budgets;
  std::string output;
  std::uint64_t seed = 1;
  std::int64_t resolution = 0;
  int max_level = kDefaultMaxLevel;
  unsigned threads = 0;
  // custom problems
  std::size_t dimension = 0;
  std::string function;
  std::vector<std::string> measure;
  std::vector<std::string> domain;
};

/// Bad configuration; line is 0 when the error did not come from a file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

Algorithm parse_algorithm(const std::string& s);
std::string to_string(Algorithm a);
/// "10,20,40" or "start:stop:step"; result must be strictly increasing.
std::vector<std::int64_t> parse_budgets(const std::string& s);
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
/// key = value lines, '#' comments.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

TestProblem resolve_problem(const ExperimentConfig& cfg);

struct ResultRow {
  std::int64_t n = 0;
  double estimate = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<int> level;
  std::int64_t evals = 0;
  std::optional<double> true_q;
  std::optional<double> abs_error;
  std::optional<double> bound;
  bool level_capped = false;
};

enum class FitMode { semilog, loglog };

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
  std::vector<std::int64_t> excluded_zero;
  std::vector<std::int64_t> excluded_capped;
};

/// Least squares of ln(err) against N (semilog) or ln N (loglog); zero-error and level-capped rows are left out.
SlopeFit fit_slope(const std::vector<ResultRow>& rows, FitMode mode);

struct ProblemConstantsEstimate {
  double L = 0.0;
  double M = 0.0;
  std::int64_t M_resolution = 0;
};

/// Lipschitz constant in use and grid-measured level-set constant, both before inflation.
ProblemConstantsEstimate problem_constants(const TestProblem& p, double true_q, std::int64_t resolution = 0);

inline constexpr double kBoundInflation = 1.5;

struct ExperimentResult {
  std::string problem;
  Algorithm algorithm = Algorithm::known;
  std::size_t d = 1;
  double alpha = 0.5;
  double lipschitz = 0.0;
  std::optional<double> true_q;
  std::optional<ProblemConstantsEstimate> constants;
  std::vector<ResultRow> rows;
  std::optional<SlopeFit> fit;
  std::string fit_error;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary(std::ostream& out, const ExperimentResult& res);

struct AdversaryRow {
  std::size_t n = 0;
  int level = 0;
  double claimed_gap = 0.0;
  double measured_gap = 0.0;
  double max_residual = 0.0;
  bool pass = false;
};

/// Default resolution: 3000 per axis for d = 2, 10^6 for d = 1.
std::vector<AdversaryRow> adversary_report(std::size_t d, const std::vector<std::size_t>& ns,
                                           const std::string& layout = "column", std::int64_t resolution = 0,
                                           std::uint64_t seed = 7);
void write_adversary_table(std::ostream& out, const std::vector<AdversaryRow>& rows);

/// Shortest round-trip decimal for CSV output.
std::string format_double(double v);

}  // namespace lipquant
