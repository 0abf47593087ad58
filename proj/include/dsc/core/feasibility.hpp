#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

#include "dsc/core/process_model.hpp"
#include "dsc/core/types.hpp"

namespace dsc {

/// 1 iff every constraint satisfies g_k <= 0. Non-finite entries are errors,
/// reported with the (d, theta) pair that produced them.
inline int indicator(std::span<const double> g, std::span<const double> d = {},
                     std::span<const double> theta = {}) {
  if (g.empty()) throw ModelError("model returned an empty constraint vector");
  int feasible = 1;
  for (double gk : g) {
    if (!std::isfinite(gk)) {
      throw NonFiniteConstraintError("model returned non-finite constraint value at d=" + format_point(d) +
                                     ", theta=" + format_point(theta));
    }
    if (gk > 0.0) feasible = 0;
  }
  return feasible;
}

namespace detail {

template <ProcessModel M>
int evaluate_indicator(const M& model, std::span<const double> d, std::span<const double> theta) {
  const Vector g = model.evaluate(d, theta);
  if (g.size() != model.constraint_count()) {
    throw ModelError("model returned " + std::to_string(g.size()) + " constraint values, expected " +
                     std::to_string(model.constraint_count()) + " at d=" + format_point(d) +
                     ", theta=" + format_point(theta));
  }
  return indicator(g, d, theta);
}

}  // namespace detail

/// Weighted fraction of uncertainty scenarios under which d is feasible.
/// Performs exactly set.size() model evaluations.
template <ProcessModel M>
double feasibility_probability(const M& model, std::span<const double> d, const UncertaintySet& set) {
  double mass = 0.0;
  for (std::size_t j : set.evaluation_order()) {
    const auto& s = set[j];
    if (detail::evaluate_indicator(model, d, s.theta)) mass += s.weight;
  }
  return std::min(mass, 1.0);
}

struct BoundedEstimate {
  std::optional<double> value;  // empty when rejected below the floor
  std::size_t evaluations = 0;

  bool rejected() const noexcept { return !value.has_value(); }
};

/// Feasibility probability with early interruption: stops as soon as the
/// accumulated feasible mass plus all remaining mass falls below `floor`.
///
/// The comparison carries a slack of 2 N eps so that a rejection is sound
/// against rounding; a returned value is bit-identical to
/// feasibility_probability since both accumulate in the same order.
template <ProcessModel M>
BoundedEstimate feasibility_probability_bounded(const M& model, std::span<const double> d, const UncertaintySet& set,
                                                double floor) {
  if (!(floor >= 0.0 && floor <= 1.0)) throw std::invalid_argument("floor must lie in [0, 1]");
  const auto order = set.evaluation_order();
  const double slack = 2.0 * static_cast<double>(order.size()) * std::numeric_limits<double>::epsilon();
  BoundedEstimate out;
  double mass = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& s = set[order[k]];
    ++out.evaluations;
    if (detail::evaluate_indicator(model, d, s.theta)) mass += s.weight;
    if (mass + set.tail_mass(k + 1) < floor - slack) return out;
  }
  out.value = std::min(mass, 1.0);
  return out;
}

}  // namespace dsc
