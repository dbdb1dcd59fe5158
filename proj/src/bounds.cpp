#include "lipquant/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lipquant {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double ell(double L) { return std::log(L) / std::log(3.0) + 2.0; }

}  // namespace

void validate(const ProblemConstants& c) {
  if (c.d < 1) throw std::invalid_argument("dimension must be at least 1");
  if (!(c.L > 0.0)) throw std::invalid_argument("L must be positive");
  if (!(c.M > 0.0)) throw std::invalid_argument("M must be positive");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

double known_bound(const ProblemConstants& c, std::int64_t N) {
  validate(c);
  const double L = c.L;
  const double M = c.M;
  const auto n = static_cast<double>(N);
  if (c.d == 1) {
    if (N < 1) throw std::invalid_argument("known_bound: N must be at least 1");
    const double a = 1.0 / (4.0 * M * L);
    return 0.5 * L * std::pow(3.0, 1.0 + a) * std::pow(3.0, -a * n);
  }
  if (N <= 1) throw std::invalid_argument("known_bound: N must exceed 1 when d > 1");
  const double d = static_cast<double>(c.d);
  const double sd = std::sqrt(d);
  const double C = 1.5 * L * sd * std::pow(std::pow(3.0, d) * M * L * sd, 1.0 / (d - 1.0));
  return C * std::pow(n - 1.0, -1.0 / (d - 1.0));
}

std::int64_t unknown_bound_min_budget(const ProblemConstants& c) {
  validate(c);
  if (c.d == 1) return 1;
  const double t = kPi2 / 3.0 * ell(c.L) * ell(c.L);
  return static_cast<std::int64_t>(std::floor(t)) + 1;
}

double unknown_bound(const ProblemConstants& c, std::int64_t N) {
  validate(c);
  if (c.L < 1.0) throw std::invalid_argument("unknown_bound: L must be at least 1");
  const double L = c.L;
  const double M = c.M;
  const double l2 = ell(L) * ell(L);
  const auto n = static_cast<double>(N);
  if (c.d == 1) {
    if (N < 1) throw std::invalid_argument("unknown_bound: N must be at least 1");
    const double C = 18.0 * L * std::pow(3.0, 1.0 / (2.0 * M * L));
    return C * std::pow(3.0, -n / (l2 * 2.0 * kPi2 * M * L));
  }
  const double shift = kPi2 / 3.0 * l2;
  if (!(n > shift)) throw std::invalid_argument("unknown_bound: N below the validity threshold");
  const double d = static_cast<double>(c.d);
  const double sd = std::sqrt(d);
  const double C = 18.0 * L * sd * std::pow(std::pow(3.0, d) * M * L * sd * (kPi2 / 2.0) * l2, 1.0 / (d - 1.0));
  return C * std::pow(n - shift, -1.0 / (d - 1.0));
}

double calls_upper(const ProblemConstants& c, int k) {
  validate(c);
  if (k < 0) throw std::invalid_argument("calls_upper: negative level");
  const double kk = static_cast<double>(k);
  if (c.d == 1) return 1.0 + 4.0 * c.M * c.L * kk;
  const double d = static_cast<double>(c.d);
  return 1.0 + std::pow(3.0, d) * 2.0 * c.M * c.L * std::sqrt(d) * (std::pow(3.0, kk * (d - 1.0)) - 1.0) /
                   (std::pow(3.0, d - 1.0) - 1.0);
}

int level_lower(const ProblemConstants& c, std::int64_t N) {
  validate(c);
  if (N < 1) throw std::invalid_argument("level_lower: N must be at least 1");
  if (c.d == 1) {
    return static_cast<int>(std::floor(static_cast<double>(N - 1) / (4.0 * c.M * c.L)));
  }
  if (N <= 1) throw std::invalid_argument("level_lower: N must exceed 1 when d > 1");
  const double d = static_cast<double>(c.d);
  const double v = (std::log(static_cast<double>(N - 1)) - std::log(std::pow(3.0, d) * c.M * c.L * std::sqrt(d))) /
                   ((d - 1.0) * std::log(3.0));
  return v < 0.0 ? 0 : static_cast<int>(std::floor(v));
}

double bracket_halfwidth(double L, int k, std::size_t d) {
  if (!(L > 0.0) || k < 0 || d < 1) throw std::invalid_argument("bracket_halfwidth: invalid arguments");
  return L * std::sqrt(static_cast<double>(d)) / (2.0 * std::pow(3.0, k));
}

}  // namespace lipquant
