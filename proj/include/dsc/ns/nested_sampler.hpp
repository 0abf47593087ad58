#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dsc/core/feasibility.hpp"
#include "dsc/core/process_model.hpp"
#include "dsc/core/rng.hpp"
#include "dsc/core/run_stats.hpp"
#include "dsc/core/types.hpp"
#include "dsc/ns/ellipsoid.hpp"

namespace dsc {

struct NSConfig {
  double alpha_star = 0.95;
  std::size_t live_points = 500;
  std::size_t proposals_per_iteration = 8;
  double enlargement0 = 0.30;
  double shrink_rate = 0.20;
  std::size_t stall_window = 50;
  double stall_epsilon = 1e-4;
  std::size_t max_iterations = 100000;
  std::uint64_t seed = 0;
  bool accelerate = false;

  void validate() const {
    if (!(alpha_star >= 0.0 && alpha_star <= 1.0)) throw std::invalid_argument("ns: alpha_star must lie in [0, 1]");
    if (live_points < 2) throw std::invalid_argument("ns: live_points must be >= 2");
    if (proposals_per_iteration < 1) throw std::invalid_argument("ns: proposals per iteration must be >= 1");
    if (!(enlargement0 >= 0.0)) throw std::invalid_argument("ns: enlargement must be >= 0");
    if (!(shrink_rate >= 0.0 && shrink_rate < 1.0)) throw std::invalid_argument("ns: shrink_rate must lie in [0, 1)");
    if (stall_window < 1) throw std::invalid_argument("ns: stall_window must be >= 1");
    if (!(stall_epsilon > 0.0)) throw std::invalid_argument("ns: stall_epsilon must be > 0");
  }

  /// Enlargement factor used at iteration t (geometric decay).
  double enlargement_at(std::size_t t) const {
    return std::max(0.0, enlargement0 * std::pow(1.0 - shrink_rate, static_cast<double>(t)));
  }
};

struct TraceRow {
  std::size_t iteration = 0;
  double p_min = 0.0;  // worst live probability at the start of the iteration
  double enlargement = 0.0;
  std::size_t model_evals = 0;  // cumulative, after the iteration's proposals
};

struct NSResult {
  std::vector<DesignSample> samples;  // dead points in archival order, then the final live set
  RunStats stats;
  std::vector<TraceRow> trace;
};

namespace detail {

struct LiveSet {
  std::vector<Vector> points;
  std::vector<double> probs;

  std::size_t worst() const {
    return static_cast<std::size_t>(std::min_element(probs.begin(), probs.end()) - probs.begin());
  }
  double mean() const {
    double sum = 0.0;
    for (double p : probs) sum += p;
    return sum / static_cast<double>(probs.size());
  }
};

}  // namespace detail

/// Nested sampling over K: the worst live point is repeatedly replaced by
/// ellipsoid proposals with a strictly higher feasibility probability until
/// every live point reaches alpha_star.
///
/// Stall rule: the run stops with stalled_empty_ds once neither the worst nor
/// the mean live probability has improved by stall_epsilon over the last
/// stall_window iterations.
template <ProcessModel M>
NSResult run_ns(const M& model, const KnowledgeSpace& space, const UncertaintySet& uncertainty, const NSConfig& cfg,
                std::vector<Vector> initial_live) {
  cfg.validate();
  if (initial_live.size() < 2) throw std::invalid_argument("ns: at least 2 initial live points are required");
  for (const auto& d : initial_live) {
    if (!space.contains(d)) throw std::invalid_argument("ns: initial live point " + format_point(d) + " lies outside K");
  }

  NSResult result;
  RunStats& stats = result.stats;
  detail::LiveSet live;
  live.points = std::move(initial_live);
  live.probs.reserve(live.points.size());
  for (const auto& d : live.points) {
    live.probs.push_back(feasibility_probability(model, d, uncertainty));
    stats.model_evals += uncertainty.size();
  }

  Rng proposal_rng = make_stream(cfg.seed, Stream::proposals);
  const double min_semi_axis = 1e-12 * space.diagonal();
  std::vector<double> p_min_history;
  std::vector<double> mean_history;

  auto all_reached = [&] {
    return std::all_of(live.probs.begin(), live.probs.end(), [&](double p) { return p >= cfg.alpha_star; });
  };

  stats.termination = Termination::reached_alpha;
  while (!all_reached()) {
    const std::size_t t = stats.iterations;
    std::size_t worst = live.worst();
    double p_min = live.probs[worst];

    p_min_history.push_back(p_min);
    mean_history.push_back(live.mean());
    if (t >= cfg.stall_window) {
      const std::size_t past = t - cfg.stall_window;
      if (p_min - p_min_history[past] < cfg.stall_epsilon && mean_history[t] - mean_history[past] < cfg.stall_epsilon) {
        stats.termination = Termination::stalled_empty_ds;
        break;
      }
    }
    if (t >= cfg.max_iterations) {
      stats.termination = Termination::max_iterations;
      break;
    }

    const double enlargement = cfg.enlargement_at(t);
    const Ellipsoid ellipsoid = enclosing_ellipsoid(live.points, enlargement, min_semi_axis);
    TraceRow row{t, p_min, enlargement, 0};

    for (std::size_t k = 0; k < cfg.proposals_per_iteration; ++k) {
      Vector d = sample_in_ellipsoid(ellipsoid, space, proposal_rng);
      ++stats.proposals_generated;
      std::optional<double> p;
      if (cfg.accelerate) {
        const auto est = feasibility_probability_bounded(model, d, uncertainty, p_min);
        stats.model_evals += est.evaluations;
        p = est.value;
      } else {
        p = feasibility_probability(model, d, uncertainty);
        stats.model_evals += uncertainty.size();
      }
      if (p && *p > p_min) {
        result.samples.push_back({std::move(live.points[worst]), p_min, SampleStatus::dead});
        live.points[worst] = std::move(d);
        live.probs[worst] = *p;
        ++stats.proposals_accepted;
        worst = live.worst();
        p_min = live.probs[worst];
      } else {
        ++stats.proposals_rejected;
      }
    }
    row.model_evals = stats.model_evals;
    result.trace.push_back(row);
    ++stats.iterations;
  }

  for (std::size_t i = 0; i < live.points.size(); ++i) {
    result.samples.push_back({std::move(live.points[i]), live.probs[i], SampleStatus::live});
  }
  return result;
}

/// Nested sampling with live points initialized uniformly over K.
template <ProcessModel M>
NSResult run_ns(const M& model, const KnowledgeSpace& space, const UncertaintySet& uncertainty, const NSConfig& cfg) {
  cfg.validate();
  Rng init_rng = make_stream(cfg.seed, Stream::live_init);
  std::vector<Vector> live(cfg.live_points);
  Vector u(space.dim());
  for (auto& d : live) {
    for (double& x : u) x = uniform01(init_rng);
    d = space.from_unit(u);
  }
  return run_ns(model, space, uncertainty, cfg, std::move(live));
}

/// Nominal design space: a single scenario at theta_nom with target 1.
template <ProcessModel M>
NSResult run_nominal(const M& model, const KnowledgeSpace& space, Vector theta_nom, NSConfig cfg) {
  cfg.alpha_star = 1.0;
  return run_ns(model, space, UncertaintySet::single(std::move(theta_nom)), cfg);
}

}  // namespace dsc
