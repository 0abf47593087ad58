#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dsc/core/feasibility.hpp"
#include "dsc/core/process_model.hpp"
#include "dsc/core/rng.hpp"
#include "dsc/core/run_stats.hpp"
#include "dsc/core/types.hpp"
#include "dsc/mc/sobol.hpp"

namespace dsc {

enum class DesignSequence { sobol, uniform_random };

struct MCConfig {
  std::size_t n_d = 1000;
  DesignSequence sequence = DesignSequence::sobol;
  std::uint64_t seed = 0;
  // Index of the first Sobol point used; 1 skips the origin.
  std::uint64_t sobol_skip = 1;

  void validate() const {
    if (n_d == 0) throw std::invalid_argument("mc: number of design samples must be >= 1");
  }
};

struct MCResult {
  std::vector<DesignSample> samples;
  RunStats stats;
};

/// Design points of a Monte Carlo sweep, in emission order.
inline std::vector<Vector> mc_design_points(const KnowledgeSpace& space, const MCConfig& cfg) {
  cfg.validate();
  std::vector<Vector> points;
  points.reserve(cfg.n_d);
  if (cfg.sequence == DesignSequence::sobol) {
    for (const auto& u : sobol_points(space.dim(), cfg.n_d, cfg.sobol_skip)) points.push_back(space.from_unit(u));
  } else {
    Rng rng = make_stream(cfg.seed, Stream::design_grid);
    Vector u(space.dim());
    for (std::size_t i = 0; i < cfg.n_d; ++i) {
      for (double& x : u) x = uniform01(rng);
      points.push_back(space.from_unit(u));
    }
  }
  return points;
}

/// Exhaustive characterization: estimates the feasibility probability at
/// every design point. All samples are reported as dead.
template <ProcessModel M>
MCResult run_mc(const M& model, const KnowledgeSpace& space, const UncertaintySet& uncertainty,
                const MCConfig& cfg) {
  MCResult result;
  const auto points = mc_design_points(space, cfg);
  result.samples.reserve(points.size());
  for (const auto& d : points) {
    const double p = feasibility_probability(model, d, uncertainty);
    result.stats.model_evals += uncertainty.size();
    result.samples.push_back({d, p, SampleStatus::dead});
  }
  result.stats.termination = Termination::completed;
  return result;
}

}  // namespace dsc
