#include "lipquant/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lipquant/quantile_core.hpp"

namespace lipquant {

double paper_function_d1(double x) {
  return 0.8 * x - 0.3 + std::exp(-11.534 * std::pow(x, 1.95)) + std::exp(-2.0 * (x - 0.9) * (x - 0.9));
}

TestProblem paper_f_d1() {
  TestProblem p;
  p.name = "paper_d1";
  p.f = [](std::span<const double> x) { return paper_function_d1(x[0]); };
  p.d = 1;
  p.lipschitz = 1.61;
  p.measure = ProductMeasure({truncated_normal_marginal(0.2, 0.2)});
  p.alpha = 0.999;
  return p;
}

TestProblem paper_f_d2(double alpha) {
  TestProblem p;
  p.name = "paper_d2";
  p.f = [](std::span<const double> x) { return x[0] + x[1]; };
  p.d = 2;
  p.lipschitz = std::numbers::sqrt2;
  p.measure = ProductMeasure::uniform(2);
  p.alpha = alpha;
  p.analytic_quantile = alpha <= 0.5 ? std::sqrt(2.0 * alpha) : 2.0 - std::sqrt(2.0 * (1.0 - alpha));
  return p;
}

TestProblem linear_d1(double alpha) {
  TestProblem p;
  p.name = "linear_d1";
  p.f = [](std::span<const double> x) { return x[0]; };
  p.d = 1;
  p.lipschitz = 1.0;
  p.measure = ProductMeasure::uniform(1);
  p.alpha = alpha;
  p.analytic_quantile = alpha;
  return p;
}

std::vector<TestProblem> test_suite() {
  std::vector<TestProblem> out{paper_f_d1(), paper_f_d2(), linear_d1()};

  TestProblem tent;
  tent.name = "tent_d1";
  tent.f = [](std::span<const double> x) { return std::fabs(x[0] - 0.4); };
  tent.d = 1;
  tent.lipschitz = 1.0;
  tent.measure = ProductMeasure({truncated_normal_marginal(0.5, 0.3)});
  tent.alpha = 0.7;
  out.push_back(tent);

  TestProblem ripple;
  ripple.name = "ripple_d2";
  ripple.f = [](std::span<const double> x) { return 0.5 * std::sin(4.0 * x[0]) + std::fabs(x[1] - 0.3); };
  ripple.d = 2;
  ripple.lipschitz = std::sqrt(5.0);
  ripple.measure = ProductMeasure({uniform_marginal(), truncated_normal_marginal(0.6, 0.25)});
  ripple.alpha = 0.8;
  out.push_back(ripple);
  return out;
}

double brute_force_quantile(const Evaluator& f, const ProductMeasure& m, double alpha, std::int64_t resolution) {
  const std::size_t d = m.dim();
  if (d > 2) throw std::invalid_argument("brute_force_quantile: d must be at most 2");
  if (resolution < 1000) throw std::invalid_argument("brute_force_quantile: resolution must be at least 1000");
  if (d == 2 && resolution > 10000) throw std::invalid_argument("brute_force_quantile: resolution too large for d = 2");
  if (d == 1 && resolution > 100000000) throw std::invalid_argument("brute_force_quantile: resolution too large");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("brute_force_quantile: alpha must lie in (0,1)");

  const auto n = static_cast<std::size_t>(resolution);
  const double h = 1.0 / static_cast<double>(resolution);
  std::vector<std::vector<double>> w(d, std::vector<double>(n));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      w[a][i] = m.marginal(a).mass(static_cast<double>(i) * h, static_cast<double>(i + 1) * h);
    }
  }
  const std::size_t total = d == 1 ? n : n * n;
  std::vector<double> values(total);
  Point x(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    x[0] = (static_cast<double>(idx % n) + 0.5) * h;
    if (d == 2) x[1] = (static_cast<double>(idx / n) + 0.5) * h;
    values[idx] = f(x);
  }
  auto mass = [&](std::size_t idx) { return d == 1 ? w[0][idx] : w[0][idx % n] * w[1][idx / n]; };

  // Weighted selection: each pass prices one pivot and draws the next pivot on both sides.
  std::mt19937_64 rng(0x5eed);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double pivot = values[total / 2];
  for (;;) {
    double s = 0.0;
    double c = 0.0;
    std::uint64_t n_low = 0;
    std::uint64_t n_high = 0;
    double pick_low = pivot;
    double pick_high = pivot;
    for (std::size_t idx = 0; idx < total; ++idx) {
      const double v = values[idx];
      if (v <= pivot) {
        const double mi = mass(idx);
        const double t = s + mi;
        c += std::fabs(s) >= std::fabs(mi) ? (s - t) + mi : (mi - t) + s;
        s = t;
        if (v > lo && v < pivot && (rng() % ++n_low) == 0) pick_low = v;
      } else if (v < hi && (rng() % ++n_high) == 0) {
        pick_high = v;
      }
    }
    if (s + c >= alpha) {
      hi = pivot;
      if (n_low == 0) return pivot;
      pivot = pick_low;
    } else {
      lo = pivot;
      if (n_high == 0) return std::isinf(hi) ? pivot : hi;
      pivot = pick_high;
    }
  }
}

double brute_force_quantile(const TestProblem& p, std::int64_t resolution) {
  return brute_force_quantile(p.f, p.measure, p.alpha, resolution);
}

namespace {

// Root of g on [a, b] where g(a) <= 0 < g(b) or the reverse, to adjacent doubles.
double bisect_root(const std::function<double(double)>& g, double a, double b) {
  double ga = g(a);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double gm = g(mid);
    if ((gm > 0.0) == (ga > 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double level_crossing_quantile(const Evaluator& f, const Marginal& m, double alpha, int scan) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("level_crossing_quantile: alpha must lie in (0,1)");
  if (scan < 100) throw std::invalid_argument("level_crossing_quantile: scan too coarse");
  std::vector<double> xs(static_cast<std::size_t>(scan) + 1);
  std::vector<double> fs(xs.size());
  double x1[1];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = static_cast<double>(i) / static_cast<double>(scan);
    x1[0] = xs[i];
    fs[i] = f(x1);
  }
  auto f1 = [&](double x) {
    x1[0] = x;
    return f(x1);
  };
  // P(f(X) > l) summed over the maximal intervals on which f exceeds l.
  auto tail = [&](double l) {
    const std::function<double(double)> g = [&](double x) { return f1(x) - l; };
    std::vector<double> parts;
    bool above = fs[0] > l;
    double start = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const bool next = fs[i + 1] > l;
      if (next == above) continue;
      const double r = bisect_root(g, xs[i], xs[i + 1]);
      if (above) parts.push_back(m.mass(start, r)); else start = r;
      above = next;
    }
    if (above) parts.push_back(m.mass(start, 1.0));
    return compensated_sum(parts);
  };
  const auto [mn, mx] = std::minmax_element(fs.begin(), fs.end());
  double lo = *mn - 1.0;
  double hi = *mx + 1.0;
  const double need = 1.0 - alpha;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (tail(mid) <= need) hi = mid; else lo = mid;
  }
  return hi;
}

double reference_quantile(const TestProblem& p) {
  if (p.analytic_quantile) return *p.analytic_quantile;
  if (p.d == 1) return level_crossing_quantile(p.f, p.measure.marginal(0), p.alpha);
  return brute_force_quantile(p, 2000);
}

double estimate_lipschitz(const Evaluator& f, std::size_t d, std::int64_t resolution) {
  if (d < 1 || d > 2) throw std::invalid_argument("estimate_lipschitz: d must be 1 or 2");
  if (resolution < 10) throw std::invalid_argument("estimate_lipschitz: resolution too small");
  if (d == 2 && resolution > 20000) throw std::invalid_argument("estimate_lipschitz: resolution too large for d = 2");
  const double h = 1.0 / static_cast<double>(resolution);
  const auto n = static_cast<std::size_t>(resolution) + 1;
  double best = 0.0;
  if (d == 1) {
    double x[1] = {0.0};
    double prev = f(x);
    for (std::size_t i = 1; i < n; ++i) {
      x[0] = static_cast<double>(i) * h;
      const double v = f(x);
      best = std::max(best, std::fabs(v - prev) / h);
      prev = v;
    }
    return best;
  }
  std::vector<double> row(n);
  std::vector<double> next(n);
  double x[2];
  for (std::size_t i = 0; i < n; ++i) {
    x[0] = static_cast<double>(i) * h;
    x[1] = 0.0;
    row[i] = f(x);
  }
  for (std::size_t r = 1; r < n; ++r) {
    x[1] = static_cast<double>(r) * h;
    for (std::size_t i = 0; i < n; ++i) {
      x[0] = static_cast<double>(i) * h;
      next[i] = f(x);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double gx = (row[i + 1] - row[i]) / h;
      const double gy = (next[i] - row[i]) / h;
      best = std::max(best, std::hypot(gx, gy));
    }
    std::swap(row, next);
  }
  return best;
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double max_slope_random_pairs(const Evaluator& f, std::size_t d, int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = 0.0;
  Point x(d);
  Point y(d);
  for (int i = 0; i < pairs; ++i) {
    for (std::size_t a = 0; a < d; ++a) x[a] = unit_uniform(rng);
    for (std::size_t a = 0; a < d; ++a) {
      y[a] = i % 2 == 0 ? unit_uniform(rng)
                        : std::clamp(x[a] + 2e-3 * (unit_uniform(rng) - 0.5), 0.0, 1.0);
    }
    double dist2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) dist2 += (x[a] - y[a]) * (x[a] - y[a]);
    if (dist2 == 0.0) continue;
    best = std::max(best, std::fabs(f(x) - f(y)) / std::sqrt(dist2));
  }
  return best;
}

LevelSetEstimate estimate_level_set_M(const TestProblem& p, std::optional<double> q, std::int64_t resolution) {
  if (p.d < 1 || p.d > 2) throw std::invalid_argument("estimate_level_set_M: d must be 1 or 2");
  const double qq = q ? *q : reference_quantile(p);
  if (resolution == 0) resolution = p.d == 1 ? 1000000 : 2000;
  const auto n = static_cast<std::size_t>(resolution);
  const double h = 1.0 / static_cast<double>(resolution);
  const std::size_t total = p.d == 1 ? n : n * n;
  std::vector<double> gaps(total);
  Point x(p.d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    x[0] = (static_cast<double>(idx % n) + 0.5) * h;
    if (p.d == 2) x[1] = (static_cast<double>(idx / n) + 0.5) * h;
    gaps[idx] = std::fabs(p.f(x) - qq);
  }
  std::sort(gaps.begin(), gaps.end());
  const auto tot = static_cast<double>(total);
  auto count = [&](double delta) {
    return static_cast<std::uint64_t>(std::upper_bound(gaps.begin(), gaps.end(), delta) - gaps.begin());
  };

  LevelSetEstimate out;
  out.resolution = resolution;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) out.ratios.emplace_back(delta, static_cast<double>(count(delta)) / tot / delta);
  // supremum of the empirical band ratio over delta >= kLevelSetFloor; it is attained at a sorted gap or at the floor
  out.worst_delta = kLevelSetFloor;
  out.M = static_cast<double>(count(kLevelSetFloor)) / tot / kLevelSetFloor;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] < kLevelSetFloor) continue;
    const double r = static_cast<double>(i + 1) / tot / gaps[i];
    if (r > out.M) {
      out.M = r;
      out.worst_delta = gaps[i];
    }
  }
  const auto wide = count(1e-1);
  out.assumption_holds = !(wide > 0 && 2 * count(1e-4) >= wide);
  return out;
}

MonteCarloEstimate monte_carlo_quantile(const TestProblem& p, std::int64_t samples, std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("monte_carlo_quantile: at least 100 samples required");
  std::mt19937_64 rng(seed);
  std::vector<double> ys(static_cast<std::size_t>(samples));
  Point x(p.d);
  for (auto& y : ys) {
    for (std::size_t a = 0; a < p.d; ++a) x[a] = p.measure.marginal(a).inverse_cdf(unit_uniform(rng));
    y = p.f(x);
  }
  std::sort(ys.begin(), ys.end());
  const auto M = static_cast<double>(samples);
  auto order_stat = [&](double u) {
    const auto r = static_cast<std::int64_t>(std::ceil(u * M));
    return ys[static_cast<std::size_t>(std::clamp<std::int64_t>(r, 1, samples) - 1)];
  };
  const double a = p.alpha;
  const double h = std::min(std::cbrt(1.0 / M), 0.5 * std::min(a, 1.0 - a));
  const double inv_density = (order_stat(a + h) - order_stat(a - h)) / (2.0 * h);
  MonteCarloEstimate out;
  out.estimate = order_stat(a);
  out.half_width = 1.96 * std::sqrt(a * (1.0 - a) / M) * inv_density;
  out.samples = samples;
  return out;
}

RandomLipschitzFunction random_lipschitz_function(std::size_t d, std::mt19937_64& rng) {
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); };
  std::vector<Point> cones(3, Point(d));
  std::vector<double> weights(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (auto& c : cones[i]) c = u(0.0, 1.0);
    weights[i] = u(-1.5, 1.5);
  }
  Point freq(d);
  for (auto& w : freq) w = u(-6.0, 6.0);
  const double amp = u(-0.8, 0.8);
  const double phase = u(0.0, 2.0 * std::numbers::pi);
  Point fa(d);
  Point fb(d);
  for (auto& v : fa) v = u(-1.0, 1.0);
  for (auto& v : fb) v = u(-1.0, 1.0);
  const double kink = u(-1.0, 1.0);

  auto norm = [](const Point& v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
  };
  double L = std::fabs(amp) * norm(freq) + std::fabs(kink) * std::max(norm(fa), norm(fb));
  for (double w : weights) L += std::fabs(w);

  auto f = [=](std::span<const double> x) {
    double v = 0.0;
    for (std::size_t i = 0; i < cones.size(); ++i) {
      double s = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) s += (x[a] - cones[i][a]) * (x[a] - cones[i][a]);
      v += weights[i] * std::sqrt(s);
    }
    double wx = phase;
    double ax = 0.0;
    double bx = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      wx += freq[a] * x[a];
      ax += fa[a] * x[a];
      bx += fb[a] * x[a];
    }
    return v + amp * std::sin(wx) + kink * std::max(ax, bx);
  };
  return RandomLipschitzFunction{f, L, d};
}

}  // namespace lipquant
