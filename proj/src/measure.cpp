#include "lipquant/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace lipquant {

double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

static double standard_normal_sf(double z) {
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

Marginal Marginal::uniform() {
  Marginal m;
  m.kind_ = MarginalKind::uniform;
  return m;
}

Marginal Marginal::truncated_normal(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw std::invalid_argument("truncated normal needs finite mu and sigma > 0");
  }
  Marginal m;
  m.kind_ = MarginalKind::truncated_normal;
  m.mu_ = mu;
  m.sigma_ = sigma;
  m.z0_ = (0.0 - mu) / sigma;
  m.z1_ = (1.0 - mu) / sigma;
  m.norm_ = mu >= 0.5 ? standard_normal_cdf(m.z1_) - standard_normal_cdf(m.z0_)
                      : standard_normal_sf(m.z0_) - standard_normal_sf(m.z1_);
  if (!(m.norm_ > 0.0)) throw std::invalid_argument("truncated normal has no mass on [0,1]");
  return m;
}

Marginal Marginal::user(std::function<double(double)> cdf) {
  if (!cdf) throw std::invalid_argument("user marginal needs a CDF");
  Marginal m;
  m.kind_ = MarginalKind::user_cdf;
  m.user_cdf_ = std::move(cdf);
  return m;
}

Marginal uniform_marginal() { return Marginal::uniform(); }
Marginal truncated_normal_marginal(double mu, double sigma) {
  return Marginal::truncated_normal(mu, sigma);
}

double Marginal::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  switch (kind_) {
    case MarginalKind::uniform:
      return x;
    case MarginalKind::truncated_normal: {
      const double z = (x - mu_) / sigma_;
      if (x <= mu_) return (standard_normal_cdf(z) - standard_normal_cdf(z0_)) / norm_;
      return 1.0 - (standard_normal_sf(z) - standard_normal_sf(z1_)) / norm_;
    }
    case MarginalKind::user_cdf:
      return std::clamp(user_cdf_(x), 0.0, 1.0);
  }
  return 0.0;
}

double Marginal::upper_tail(double x) const {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  const double z = (x - mu_) / sigma_;
  return (standard_normal_sf(z) - standard_normal_sf(z1_)) / norm_;
}

double Marginal::mass(double lo, double hi) const {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (!(hi > lo)) return 0.0;
  switch (kind_) {
    case MarginalKind::uniform:
      return hi - lo;
    case MarginalKind::truncated_normal:
      // Differences of survival functions keep relative accuracy above the mode.
      if (lo >= mu_) return std::max(0.0, upper_tail(lo) - upper_tail(hi));
      return std::max(0.0, (standard_normal_cdf((hi - mu_) / sigma_) -
                            standard_normal_cdf((lo - mu_) / sigma_)) / norm_);
    case MarginalKind::user_cdf:
      return std::max(0.0, cdf(hi) - cdf(lo));
  }
  return 0.0;
}

double Marginal::inverse_cdf(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("inverse_cdf: u outside [0,1]");
  if (kind_ == MarginalKind::uniform) return u;
  if (cdf(0.0) >= u) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= u) hi = mid; else lo = mid;
  }
  return hi;
}

ProductMeasure::ProductMeasure(std::vector<Marginal> marginals) : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw std::invalid_argument("product measure needs at least one marginal");
}

ProductMeasure ProductMeasure::uniform(std::size_t d) {
  return ProductMeasure(std::vector<Marginal>(d, Marginal::uniform()));
}

double ProductMeasure::box_probability(const Box& box) const {
  if (box.lower.size() != dim() || box.upper.size() != dim()) {
    throw std::invalid_argument("box dimension does not match the measure");
  }
  double p = 1.0;
  for (std::size_t j = 0; j < dim(); ++j) p *= marginals_[j].mass(box.lower[j], box.upper[j]);
  return p;
}

double cell_probability(const ProductMeasure& m, const MultiIndex& b) {
  if (b.dim() != m.dim()) throw std::invalid_argument("cell dimension does not match the measure");
  const auto r = cell_box_exact(b);
  const double den = static_cast<double>(r.denom);
  double p = 1.0;
  for (std::size_t j = 0; j < b.dim(); ++j) {
    const auto& mj = m.marginal(j);
    if (mj.kind() == MarginalKind::uniform) {
      p *= 1.0 / den;
    } else {
      p *= mj.mass(static_cast<double>(r.lower_num[j]) / den, static_cast<double>(r.upper_num[j]) / den);
    }
  }
  return p;
}

double cell_probability(const ProductMeasure& m, const Cell& c) { return cell_probability(m, c.index); }

}  // namespace lipquant
