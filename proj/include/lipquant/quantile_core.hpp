#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lipquant {

/// eligible: value of an active cell; frozen: value inherited by a pruned subtree.
enum class Origin { eligible, frozen };

struct MassPoint {
  double value = 0.0;
  double mass = 0.0;
  Origin origin = Origin::eligible;
};

class ValueMassTable {
 public:
  ValueMassTable() = default;
  explicit ValueMassTable(std::vector<MassPoint> points);

  void add(double value, double mass, Origin origin = Origin::eligible);
  void append(std::span<const MassPoint> points);
  void reserve(std::size_t n) { points_.reserve(n); }

  const std::vector<MassPoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  bool has_eligible() const;
  /// Compensated sum of all masses.
  double total_mass() const;

 private:
  std::vector<MassPoint> points_;
};

/// Largest eligible v with mass{w >= v} >= 1 - alpha; the smallest eligible value if none qualifies.
double weighted_quantile_sup(const ValueMassTable& t, double alpha);
/// Smallest eligible v with mass{w <= v} >= alpha; the largest eligible value if none qualifies.
double weighted_quantile_inf(const ValueMassTable& t, double alpha);

/// Neumaier summation.
double compensated_sum(std::span<const double> xs);

}  // namespace lipquant
