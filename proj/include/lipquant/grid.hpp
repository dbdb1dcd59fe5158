#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lipquant {

using Point = std::vector<double>;
using Evaluator = std::function<double(std::span<const double>)>;

/// Deepest level for which 2*3^k stays exactly representable as a double.
inline constexpr int kMaxGridLevel = 33;

std::int64_t pow3(int k);

/// Cell address at level k: digits beta_j in [0, 3^k).
struct MultiIndex {
  int level = 0;
  std::vector<std::int64_t> digits;

  std::size_t dim() const { return digits.size(); }
  bool operator==(const MultiIndex&) const = default;
  auto operator<=>(const MultiIndex&) const = default;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& b) const noexcept;
};

MultiIndex root_index(std::size_t d);
bool is_valid(const MultiIndex& b);

Point center(const MultiIndex& b);
double half_radius(int k, std::size_t d);

/// Child 3*beta + offset, offset in {0,1,2}^d.
MultiIndex child(const MultiIndex& b, std::span<const int> offset);
MultiIndex center_child(const MultiIndex& b);
/// All 3^d children, offsets enumerated with the first axis varying fastest.
std::vector<MultiIndex> children(const MultiIndex& b);
bool is_center_child(const MultiIndex& b);
MultiIndex parent_l(const MultiIndex& b, int l);

/// Box endpoints as integers over the common denominator 3^k.
struct RationalBox {
  std::vector<std::int64_t> lower_num;
  std::vector<std::int64_t> upper_num;
  std::int64_t denom = 1;
};

struct Box {
  Point lower;
  Point upper;
};

RationalBox cell_box_exact(const MultiIndex& b);
/// Half-open per axis, closed at coordinate 1.
Box cell_box(const MultiIndex& b);

struct Cell {
  MultiIndex index;
  Point center;
  double half_width_inf = 0.0;
  double radius = 0.0;
};

Cell make_cell(const MultiIndex& b);

/// Every cell of the level-k partition, first axis fastest.
std::vector<MultiIndex> level_cells(std::size_t d, int k);

struct BoxDomain {
  Point lower;
  Point upper;
};

struct RescaledProblem {
  Evaluator g;
  double c1 = 1.0;
  double c2 = 1.0;
};

/// g(y) = f(a + (b - a) * y) on the unit cube.
RescaledProblem rescale_problem(const BoxDomain& domain, Evaluator f);

}  // namespace lipquant
