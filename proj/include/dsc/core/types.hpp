#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/spdlog.h>

namespace dsc {

using Vector = std::vector<double>;

/// Raised when a process model cannot produce a usable constraint vector.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteConstraintError : public ModelError {
 public:
  using ModelError::ModelError;
};

inline std::string format_point(std::span<const double> x) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out << ", ";
    out << x[i];
  }
  out << ')';
  return out.str();
}

/// Axis-aligned box of process parameters.
class KnowledgeSpace {
 public:
  KnowledgeSpace(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty()) throw std::invalid_argument("knowledge space must have at least one dimension");
    if (lower_.size() != upper_.size()) {
      throw std::invalid_argument("knowledge space: lower has " + std::to_string(lower_.size()) +
                                  " entries but upper has " + std::to_string(upper_.size()));
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
        std::ostringstream msg;
        msg << "knowledge space: lower[" << i << "] = " << lower_[i] << " must be finite and < upper[" << i
            << "] = " << upper_[i];
        throw std::invalid_argument(msg.str());
      }
    }
  }

  std::size_t dim() const noexcept { return lower_.size(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

  bool contains(std::span<const double> d) const noexcept {
    if (d.size() != dim()) return false;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!(d[i] >= lower_[i] && d[i] <= upper_[i])) return false;
    }
    return true;
  }

  /// Affine map of the unit cube onto the box.
  Vector from_unit(std::span<const double> u) const {
    Vector d(dim());
    for (std::size_t i = 0; i < dim(); ++i) d[i] = lower_[i] + u[i] * (upper_[i] - lower_[i]);
    return d;
  }

  double diagonal() const noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) sum += (upper_[i] - lower_[i]) * (upper_[i] - lower_[i]);
    return std::sqrt(sum);
  }

  friend bool operator==(const KnowledgeSpace&, const KnowledgeSpace&) = default;

 private:
  Vector lower_;
  Vector upper_;
};

struct ThetaSample {
  Vector theta;
  double weight = 1.0;
};

/// Weighted scenarios discretizing the model-parameter distribution.
///
/// Weights are normalized to unit mass on construction. The set also keeps the
/// evaluation order used by every feasibility estimator (descending weight,
/// ties by ascending index) together with the tail mass after each position,
/// so that interrupted and full evaluations accumulate in the same order.
class UncertaintySet {
 public:
  explicit UncertaintySet(std::vector<ThetaSample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("uncertainty set must contain at least one sample");
    const std::size_t n_theta = samples_.front().theta.size();
    if (n_theta == 0) throw std::invalid_argument("uncertainty samples must have dimension >= 1");
    for (std::size_t j = 0; j < samples_.size(); ++j) {
      const auto& s = samples_[j];
      if (s.theta.size() != n_theta) {
        throw std::invalid_argument("uncertainty sample " + std::to_string(j) + " has dimension " +
                                    std::to_string(s.theta.size()) + ", expected " + std::to_string(n_theta));
      }
      if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
        throw std::invalid_argument("uncertainty sample " + std::to_string(j) + " has non-positive weight");
      }
      for (double v : s.theta) {
        if (!std::isfinite(v)) {
          throw std::invalid_argument("uncertainty sample " + std::to_string(j) + " has a non-finite entry");
        }
      }
    }
    // Sum in sorted order so the normalized weights do not depend on input order.
    Vector raw;
    raw.reserve(samples_.size());
    for (const auto& s : samples_) raw.push_back(s.weight);
    std::sort(raw.begin(), raw.end(), std::greater<>());
    double raw_sum = 0.0;
    for (double w : raw) raw_sum += w;
    if (std::abs(raw_sum - 1.0) > 1e-6) {
      spdlog::warn("uncertainty weights sum to {} ({} samples); normalizing to 1", raw_sum, samples_.size());
    }
    for (auto& s : samples_) s.weight /= raw_sum;

    order_.resize(samples_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [this](std::size_t a, std::size_t b) { return samples_[a].weight > samples_[b].weight; });
    tail_mass_.assign(samples_.size() + 1, 0.0);
    for (std::size_t k = samples_.size(); k-- > 0;) tail_mass_[k] = tail_mass_[k + 1] + samples_[order_[k]].weight;
  }

  /// Equal-weight set from raw parameter vectors.
  static UncertaintySet equal_weights(const std::vector<Vector>& thetas) {
    std::vector<ThetaSample> samples;
    samples.reserve(thetas.size());
    const double w = thetas.empty() ? 1.0 : 1.0 / static_cast<double>(thetas.size());
    for (const auto& t : thetas) samples.push_back({t, w});
    return UncertaintySet(std::move(samples));
  }

  static UncertaintySet single(Vector theta) { return UncertaintySet({ThetaSample{std::move(theta), 1.0}}); }

  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t dim() const noexcept { return samples_.front().theta.size(); }
  const ThetaSample& operator[](std::size_t j) const { return samples_[j]; }
  const std::vector<ThetaSample>& samples() const noexcept { return samples_; }

  /// Sample indices in accumulation order.
  std::span<const std::size_t> evaluation_order() const noexcept { return order_; }

  /// Mass of the samples at positions >= k of evaluation_order().
  double tail_mass(std::size_t k) const { return tail_mass_.at(k); }

 private:
  std::vector<ThetaSample> samples_;
  std::vector<std::size_t> order_;
  std::vector<double> tail_mass_;
};

enum class SampleStatus { live, dead };

inline const char* to_string(SampleStatus s) { return s == SampleStatus::live ? "live" : "dead"; }

/// A design point with its estimated feasibility probability.
/// An empty `prob` marks a point whose estimate was interrupted.
struct DesignSample {
  Vector d;
  std::optional<double> prob;
  SampleStatus status = SampleStatus::dead;

  friend bool operator==(const DesignSample&, const DesignSample&) = default;
};

}  // namespace dsc
