#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "dsc/core/rng.hpp"
#include "dsc/core/types.hpp"

namespace dsc {

/// Equal-weight draws from N(mean, covariance).
struct NormalSpec {
  Vector mean;
  std::vector<Vector> covariance;  // row-major, square
  std::size_t count = 100;
};

inline UncertaintySet sample_normal(const NormalSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.mean.size();
  if (n == 0) throw std::invalid_argument("normal: mean must not be empty");
  if (spec.count == 0) throw std::invalid_argument("normal: sample count must be >= 1");
  if (spec.covariance.size() != n) throw std::invalid_argument("normal: covariance must be " + std::to_string(n) + "x" + std::to_string(n));
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.covariance[i].size() != n) {
      throw std::invalid_argument("normal: covariance row " + std::to_string(i) + " must have " + std::to_string(n) +
                                  " entries");
    }
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = spec.covariance[i][j];
  }
  if (!cov.isApprox(cov.transpose(), 1e-12)) throw std::invalid_argument("normal: covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("normal: covariance must be positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  Rng rng = make_stream(seed, Stream::uncertainty);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> thetas;
  thetas.reserve(spec.count);
  Eigen::VectorXd z(n);
  for (std::size_t k = 0; k < spec.count; ++k) {
    for (std::size_t i = 0; i < n; ++i) z(i) = normal(rng);
    const Eigen::VectorXd x = chol * z;
    Vector theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = spec.mean[i] + x(i);
    thetas.push_back(std::move(theta));
  }
  return UncertaintySet::equal_weights(thetas);
}

}  // namespace dsc
