#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "dsc/core/rng.hpp"
#include "dsc/core/types.hpp"

namespace dsc {

class EllipsoidSamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ellipsoid {x : (x - c)^T A (x - c) <= 1}, inflated by a factor
/// (1 + enlargement) along every axis for membership and sampling.
class Ellipsoid {
 public:
  /// `axes` are the principal directions (columns) and `semi_axes` their half lengths.
  Ellipsoid(Eigen::VectorXd center, const Eigen::MatrixXd& axes, const Eigen::VectorXd& semi_axes, double enlargement)
      : center_(std::move(center)), semi_axes_(semi_axes), enlargement_(enlargement) {
    if (enlargement < 0.0) throw std::invalid_argument("ellipsoid: enlargement must be >= 0");
    if ((semi_axes.array() <= 0.0).any()) throw std::invalid_argument("ellipsoid: semi-axes must be positive");
    transform_ = axes * semi_axes.asDiagonal();
    shape_ = axes * semi_axes.array().square().inverse().matrix().asDiagonal() * axes.transpose();
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(center_.size()); }
  const Eigen::VectorXd& center() const noexcept { return center_; }
  const Eigen::MatrixXd& shape() const noexcept { return shape_; }
  const Eigen::VectorXd& semi_axes() const noexcept { return semi_axes_; }
  double enlargement() const noexcept { return enlargement_; }
  double scale() const noexcept { return 1.0 + enlargement_; }

  /// (x - c)^T A (x - c) with the un-enlarged shape.
  double mahalanobis_sq(std::span<const double> x) const {
    const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) - center_;
    return diff.dot(shape_ * diff);
  }

  bool contains(std::span<const double> x) const { return mahalanobis_sq(x) <= scale() * scale(); }

  /// Uniform draw from the enlarged ellipsoid.
  Vector sample(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = center_.size();
    Eigen::VectorXd z(n);
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
      norm = z.norm();
    } while (norm == 0.0);
    const double radius = std::pow(uniform01(rng), 1.0 / static_cast<double>(n));
    const Eigen::VectorXd x = center_ + scale() * (transform_ * (z * (radius / norm)));
    return Vector(x.data(), x.data() + n);
  }

 private:
  Eigen::VectorXd center_;
  Eigen::VectorXd semi_axes_;
  Eigen::MatrixXd transform_;  // unit ball -> un-enlarged ellipsoid
  Eigen::MatrixXd shape_;
  double enlargement_;
};

/// Covariance-based bounding ellipsoid: centered at the mean, shaped by the
/// inverse sample covariance (ridge 1e-10 * trace), and scaled so that the
/// farthest point lies on the un-enlarged boundary. Semi-axes are floored at
/// `min_semi_axis` to keep degenerate point sets full-dimensional.
inline Ellipsoid enclosing_ellipsoid(std::span<const Vector> points, double enlargement, double min_semi_axis = 0.0) {
  if (points.size() < 2) throw std::invalid_argument("ellipsoid: at least 2 points are required");
  const auto n = static_cast<Eigen::Index>(points.front().size());
  if (n == 0) throw std::invalid_argument("ellipsoid: points must have dimension >= 1");
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != static_cast<std::size_t>(n)) throw std::invalid_argument("ellipsoid: inconsistent point dimensions");
    x.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(points[k].data(), n);
  }
  const Eigen::VectorXd center = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - center;
  Eigen::MatrixXd cov = (centered * centered.transpose()) / static_cast<double>(points.size());
  cov.diagonal().array() += 1e-10 * cov.trace();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("ellipsoid: eigendecomposition failed");
  const Eigen::MatrixXd& axes = eig.eigenvectors();
  // Variances along principal axes, kept strictly positive.
  const double tiny = std::max(min_semi_axis * min_semi_axis, std::numeric_limits<double>::min());
  const Eigen::VectorXd variances = eig.eigenvalues().cwiseMax(tiny);

  // Squared Mahalanobis radius of the farthest point.
  const Eigen::MatrixXd projected = axes.transpose() * centered;
  double max_r2 = 0.0;
  for (Eigen::Index k = 0; k < projected.cols(); ++k) {
    max_r2 = std::max(max_r2, (projected.col(k).array().square() / variances.array()).sum());
  }
  if (max_r2 <= 0.0) max_r2 = 1.0;
  // Small inflation absorbs rounding so every input point passes contains().
  max_r2 *= 1.0 + 1e-10;

  Eigen::VectorXd semi_axes = (variances * max_r2).cwiseSqrt();
  semi_axes = semi_axes.cwiseMax(min_semi_axis);
  return Ellipsoid(center, axes, semi_axes, enlargement);
}

/// Uniform draw from the intersection of the enlarged ellipsoid and K, by
/// rejection against K.
inline Vector sample_in_ellipsoid(const Ellipsoid& e, const KnowledgeSpace& space, Rng& rng,
                                  std::size_t max_rejections = 100000) {
  for (std::size_t attempt = 0; attempt <= max_rejections; ++attempt) {
    Vector x = e.sample(rng);
    if (space.contains(x)) return x;
  }
  throw EllipsoidSamplingError("ellipsoid nearly disjoint from knowledge space (" + std::to_string(max_rejections) +
                               " consecutive rejections)");
}

}  // namespace dsc
