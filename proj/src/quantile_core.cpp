#include "lipquant/quantile_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace lipquant {

namespace {

struct Group {
  double value;
  double mass;
  bool eligible;
};

void check_args(const ValueMassTable& t, double alpha) {
  if (t.empty()) throw std::invalid_argument("weighted quantile of an empty table");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!t.has_eligible()) throw std::invalid_argument("weighted quantile needs an eligible point");
}

// Equal values merged; ascending order.
std::vector<Group> grouped(const ValueMassTable& t) {
  std::vector<MassPoint> pts = t.points();
  std::stable_sort(pts.begin(), pts.end(),
                   [](const MassPoint& a, const MassPoint& b) { return a.value < b.value; });
  std::vector<Group> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    const bool el = p.origin == Origin::eligible;
    if (!out.empty() && out.back().value == p.value) {
      out.back().mass += p.mass;
      out.back().eligible = out.back().eligible || el;
    } else {
      out.push_back({p.value, p.mass, el});
    }
  }
  return out;
}

}  // namespace

ValueMassTable::ValueMassTable(std::vector<MassPoint> points) : points_(std::move(points)) {
  for (const auto& p : points_) {
    if (!(p.mass >= 0.0)) throw std::invalid_argument("negative mass in value-mass table");
  }
}

void ValueMassTable::add(double value, double mass, Origin origin) {
  if (!(mass >= 0.0)) throw std::invalid_argument("negative mass in value-mass table");
  points_.push_back({value, mass, origin});
}

void ValueMassTable::append(std::span<const MassPoint> points) {
  for (const auto& p : points) add(p.value, p.mass, p.origin);
}

bool ValueMassTable::has_eligible() const {
  return std::any_of(points_.begin(), points_.end(),
                     [](const MassPoint& p) { return p.origin == Origin::eligible; });
}

double ValueMassTable::total_mass() const {
  std::vector<double> m;
  m.reserve(points_.size());
  for (const auto& p : points_) m.push_back(p.mass);
  return compensated_sum(m);
}

double compensated_sum(std::span<const double> xs) {
  double s = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double t = s + x;
    c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

double weighted_quantile_sup(const ValueMassTable& t, double alpha) {
  check_args(t, alpha);
  const auto g = grouped(t);
  const double need = 1.0 - alpha;
  double cum = 0.0;
  bool reached = false;
  for (std::size_t i = g.size(); i-- > 0;) {
    cum += g[i].mass;
    if (cum >= need) reached = true;
    if (reached && g[i].eligible) return g[i].value;
  }
  for (const auto& x : g) {
    if (x.eligible) return x.value;
  }
  throw std::logic_error("unreachable: no eligible group");
}

double weighted_quantile_inf(const ValueMassTable& t, double alpha) {
  check_args(t, alpha);
  const auto g = grouped(t);
  double cum = 0.0;
  bool reached = false;
  for (const auto& x : g) {
    cum += x.mass;
    if (cum >= alpha) reached = true;
    if (reached && x.eligible) return x.value;
  }
  for (std::size_t i = g.size(); i-- > 0;) {
    if (g[i].eligible) return g[i].value;
  }
  throw std::logic_error("unreachable: no eligible group");
}

}  // namespace lipquant
