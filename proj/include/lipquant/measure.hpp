#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "lipquant/grid.hpp"

namespace lipquant {

/// Standard normal CDF through erfc, accurate in both tails.
double standard_normal_cdf(double z);

enum class MarginalKind { uniform, truncated_normal, user_cdf };

/// One-dimensional law on [0,1] described by its CDF.
class Marginal {
 public:
  static Marginal uniform();
  static Marginal truncated_normal(double mu, double sigma);
  static Marginal user(std::function<double(double)> cdf);

  MarginalKind kind() const { return kind_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  double cdf(double x) const;
  /// P(lo <= X <= hi).
  double mass(double lo, double hi) const;
  /// Smallest x with cdf(x) >= u, by bisection to 1e-12 (exact for the uniform law).
  double inverse_cdf(double u) const;

 private:
  Marginal() = default;
  double upper_tail(double x) const;

  MarginalKind kind_ = MarginalKind::uniform;
  double mu_ = 0.0;
  double sigma_ = 1.0;
  double z0_ = 0.0;
  double z1_ = 0.0;
  double norm_ = 1.0;
  std::function<double(double)> user_cdf_;
};

Marginal uniform_marginal();
Marginal truncated_normal_marginal(double mu, double sigma);

class ProductMeasure {
 public:
  explicit ProductMeasure(std::vector<Marginal> marginals);
  static ProductMeasure uniform(std::size_t d);

  std::size_t dim() const { return marginals_.size(); }
  const Marginal& marginal(std::size_t i) const { return marginals_.at(i); }
  const std::vector<Marginal>& marginals() const { return marginals_; }
  double box_probability(const Box& box) const;

 private:
  std::vector<Marginal> marginals_;
};

double cell_probability(const ProductMeasure& m, const MultiIndex& b);
double cell_probability(const ProductMeasure& m, const Cell& c);

}  // namespace lipquant
