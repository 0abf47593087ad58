#pragma once

#include <cstdint>
#include <random>

namespace dsc {

using Rng = std::mt19937_64;

/// Independent random substreams derived from one master seed.
enum class Stream : std::uint32_t {
  live_init = 1,    // initial live points, uniform over K
  proposals = 2,    // ellipsoid replacement proposals
  uncertainty = 3,  // generated uncertainty sets
  design_grid = 4,  // uniform-random Monte Carlo designs
  surrogate = 5,    // network initialization and shuffling
};

inline Rng make_stream(std::uint64_t master_seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32), static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

/// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace dsc
