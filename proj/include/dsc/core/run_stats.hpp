#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace dsc {

enum class Termination {
  completed,         // Monte Carlo sweep finished
  reached_alpha,     // every live point meets the reliability target
  stalled_empty_ds,  // no progress; target design space presumed empty
  max_iterations,
};

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::reached_alpha: return "reached_alpha";
    case Termination::stalled_empty_ds: return "stalled_empty_ds";
    case Termination::max_iterations: return "max_iterations";
  }
  return "unknown";
}

inline std::optional<Termination> termination_from_string(std::string_view s) {
  for (auto t : {Termination::completed, Termination::reached_alpha, Termination::stalled_empty_ds,
                 Termination::max_iterations}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

/// Counters reported by both samplers. Proposals falling outside K are
/// resampled and never counted here.
struct RunStats {
  std::size_t model_evals = 0;
  std::size_t iterations = 0;
  std::size_t proposals_generated = 0;
  std::size_t proposals_accepted = 0;
  std::size_t proposals_rejected = 0;
  Termination termination = Termination::completed;
};

}  // namespace dsc
