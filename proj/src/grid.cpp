#include "lipquant/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lipquant {

std::int64_t pow3(int k) {
  if (k < 0 || k > 39) throw std::out_of_range("pow3: exponent out of range");
  std::int64_t p = 1;
  for (int i = 0; i < k; ++i) p *= 3;
  return p;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& b) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(b.level);
  for (auto v : b.digits) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

MultiIndex root_index(std::size_t d) {
  if (d == 0) throw std::invalid_argument("dimension must be at least 1");
  return MultiIndex{0, std::vector<std::int64_t>(d, 0)};
}

bool is_valid(const MultiIndex& b) {
  if (b.level < 0 || b.level > kMaxGridLevel || b.digits.empty()) return false;
  const auto n = pow3(b.level);
  return std::all_of(b.digits.begin(), b.digits.end(),
                     [n](std::int64_t v) { return v >= 0 && v < n; });
}

static void require_valid(const MultiIndex& b) {
  if (!is_valid(b)) {
    throw std::invalid_argument("invalid multi-index at level " + std::to_string(b.level));
  }
}

Point center(const MultiIndex& b) {
  require_valid(b);
  const double den = 2.0 * static_cast<double>(pow3(b.level));
  Point c(b.dim());
  for (std::size_t j = 0; j < b.dim(); ++j) {
    c[j] = static_cast<double>(2 * b.digits[j] + 1) / den;
  }
  return c;
}

double half_radius(int k, std::size_t d) {
  if (k < 0 || d == 0) throw std::invalid_argument("half_radius: need k >= 0 and d >= 1");
  return std::sqrt(static_cast<double>(d)) / (2.0 * std::pow(3.0, k));
}

MultiIndex child(const MultiIndex& b, std::span<const int> offset) {
  if (offset.size() != b.dim()) throw std::invalid_argument("child: offset dimension mismatch");
  if (b.level + 1 > kMaxGridLevel) throw std::out_of_range("child: level limit reached");
  MultiIndex c{b.level + 1, b.digits};
  for (std::size_t j = 0; j < b.dim(); ++j) {
    if (offset[j] < 0 || offset[j] > 2) throw std::invalid_argument("child: offset outside {0,1,2}");
    c.digits[j] = 3 * b.digits[j] + offset[j];
  }
  return c;
}

MultiIndex center_child(const MultiIndex& b) {
  const std::vector<int> ones(b.dim(), 1);
  return child(b, ones);
}

std::vector<MultiIndex> children(const MultiIndex& b) {
  const std::size_t d = b.dim();
  const auto count = static_cast<std::size_t>(pow3(static_cast<int>(d)));
  std::vector<MultiIndex> out;
  out.reserve(count);
  std::vector<int> offset(d, 0);
  for (std::size_t n = 0; n < count; ++n) {
    out.push_back(child(b, offset));
    for (std::size_t j = 0; j < d; ++j) {
      if (++offset[j] < 3) break;
      offset[j] = 0;
    }
  }
  return out;
}

bool is_center_child(const MultiIndex& b) {
  if (b.level == 0) return false;
  return std::all_of(b.digits.begin(), b.digits.end(), [](std::int64_t v) { return v % 3 == 1; });
}

MultiIndex parent_l(const MultiIndex& b, int l) {
  if (l < 0 || l > b.level) throw std::invalid_argument("parent_l: steps must lie in [0, level]");
  MultiIndex p = b;
  const auto q = pow3(l);
  p.level -= l;
  for (auto& v : p.digits) v /= q;
  return p;
}

RationalBox cell_box_exact(const MultiIndex& b) {
  require_valid(b);
  RationalBox r;
  r.denom = pow3(b.level);
  r.lower_num = b.digits;
  r.upper_num = b.digits;
  for (auto& v : r.upper_num) v += 1;
  return r;
}

Box cell_box(const MultiIndex& b) {
  const auto r = cell_box_exact(b);
  const double den = static_cast<double>(r.denom);
  Box box{Point(b.dim()), Point(b.dim())};
  for (std::size_t j = 0; j < b.dim(); ++j) {
    box.lower[j] = static_cast<double>(r.lower_num[j]) / den;
    box.upper[j] = static_cast<double>(r.upper_num[j]) / den;
  }
  return box;
}

Cell make_cell(const MultiIndex& b) {
  Cell c;
  c.index = b;
  c.center = center(b);
  c.half_width_inf = 1.0 / (2.0 * static_cast<double>(pow3(b.level)));
  c.radius = half_radius(b.level, b.dim());
  return c;
}

std::vector<MultiIndex> level_cells(std::size_t d, int k) {
  if (d == 0 || k < 0) throw std::invalid_argument("level_cells: need d >= 1 and k >= 0");
  const auto n = pow3(k);
  const double total = std::pow(static_cast<double>(n), static_cast<double>(d));
  if (total > 1e7) throw std::length_error("level_cells: partition too large to enumerate");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(total));
  MultiIndex cur{k, std::vector<std::int64_t>(d, 0)};
  for (;;) {
    out.push_back(cur);
    std::size_t j = 0;
    for (; j < d; ++j) {
      if (++cur.digits[j] < n) break;
      cur.digits[j] = 0;
    }
    if (j == d) break;
  }
  return out;
}

RescaledProblem rescale_problem(const BoxDomain& domain, Evaluator f) {
  const std::size_t d = domain.lower.size();
  if (d == 0 || domain.upper.size() != d) throw std::invalid_argument("rescale_problem: malformed domain");
  Point width(d);
  double c1 = 0.0;
  double c2 = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    width[i] = domain.upper[i] - domain.lower[i];
    if (!(width[i] > 0.0)) throw std::invalid_argument("rescale_problem: empty side in domain");
    c1 = std::max(c1, width[i]);
    c2 *= width[i];
  }
  auto g = [lower = domain.lower, width, f = std::move(f)](std::span<const double> y) {
    Point x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = lower[i] + width[i] * y[i];
    return f(x);
  };
  return RescaledProblem{std::move(g), c1, c2};
}

}  // namespace lipquant
