#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "dsc/benchmark/special_functions.hpp"
#include "dsc/core/types.hpp"

namespace dsc::illustrative {

/// Admissible range of the quality attribute s.
struct CqaBand {
  double lower = 0.20;
  double upper = 0.75;
};

/// Normal distribution of the scalar model parameter.
struct NormalTheta {
  double mu = 0.0;
  double sigma = 1.0;

  NormalTheta() = default;
  NormalTheta(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
      throw std::invalid_argument("normal prior requires finite mu and sigma > 0");
    }
  }
};

inline constexpr double kNominalTheta = 1.0;

inline KnowledgeSpace knowledge_space() { return KnowledgeSpace({-1.0, -1.0}, {1.0, 1.0}); }

/// s = theta * d1^2 + d2, constrained to lower <= s <= upper.
class Model {
 public:
  Model() = default;
  explicit Model(CqaBand band) : band_(band) {
    if (!(band.lower <= band.upper)) throw std::invalid_argument("CQA band requires lower <= upper");
  }

  std::size_t constraint_count() const noexcept { return 2; }

  static double quality_attribute(std::span<const double> d, double theta) { return theta * d[0] * d[0] + d[1]; }

  Vector evaluate(std::span<const double> d, std::span<const double> theta) const {
    if (d.size() != 2 || theta.size() != 1) {
      throw ModelError("illustrative model expects d of size 2 and theta of size 1, got " +
                       std::to_string(d.size()) + " and " + std::to_string(theta.size()));
    }
    const double s = quality_attribute(d, theta[0]);
    return {band_.lower - s, s - band_.upper};
  }

  const CqaBand& band() const noexcept { return band_; }

 private:
  CqaBand band_{};
};

/// Closed-form feasibility probability under theta ~ N(mu, sigma).
/// At d1 = 0 the parameter drops out and the result is the band indicator.
inline double analytic_probability(std::span<const double> d, const NormalTheta& prior, const CqaBand& band = {}) {
  const double a = d[0] * d[0];
  if (a == 0.0) return (d[1] >= band.lower && d[1] <= band.upper) ? 1.0 : 0.0;
  const double scale = std::numbers::sqrt2 * prior.sigma * a;
  const double hi = std::erf((band.upper - prior.mu * a - d[1]) / scale);
  const double lo = std::erf((band.lower - prior.mu * a - d[1]) / scale);
  return std::clamp(0.5 * (hi - lo), 0.0, 1.0);
}

/// Set-membership counterpart: feasibility for every theta in the HPD
/// interval mu +/- z_alpha sigma.
inline bool analytic_robust_member(std::span<const double> d, const NormalTheta& prior, double alpha,
                                   const CqaBand& band = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const double z = normal_hpd_quantile(alpha);
  const double a = d[0] * d[0];
  return band.lower - (prior.mu - z * prior.sigma) * a <= d[1] && d[1] <= band.upper - (prior.mu + z * prior.sigma) * a;
}

/// Nominal design space membership at theta = 1.
inline bool nominal_member(std::span<const double> d, const CqaBand& band = {}) {
  const double s = kNominalTheta * d[0] * d[0] + d[1];
  return band.lower <= s && s <= band.upper;
}

}  // namespace dsc::illustrative
