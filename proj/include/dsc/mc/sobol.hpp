#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsc/core/types.hpp"

namespace dsc {

inline constexpr std::size_t kSobolMaxDimensions = 32;

namespace detail {

struct SobolDirectionInit {
  unsigned degree;      // s
  unsigned inner;       // a: interior coefficients of the primitive polynomial
  std::array<unsigned, 8> m;
};

// Joe & Kuo (2008) new-joe-kuo-6.21201, dimensions 2..32.
// Dimension 1 uses m_i = 1 throughout and is handled separately.
inline constexpr std::array<SobolDirectionInit, kSobolMaxDimensions - 1> kJoeKuo{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
    {7, 7, {1, 1, 3, 13, 7, 35, 63}},
    {7, 8, {1, 3, 5, 9, 1, 25, 53}},
    {7, 14, {1, 3, 1, 13, 9, 35, 107}},
    {7, 19, {1, 3, 1, 5, 27, 61, 31}},
    {7, 21, {1, 1, 5, 11, 19, 41, 61}},
    {7, 28, {1, 3, 5, 3, 3, 13, 69}},
    {7, 31, {1, 1, 7, 13, 1, 19, 1}},
    {7, 32, {1, 3, 7, 5, 13, 19, 59}},
    {7, 37, {1, 1, 3, 9, 25, 29, 41}},
    {7, 41, {1, 3, 5, 13, 23, 1, 55}},
    {7, 42, {1, 3, 7, 3, 13, 59, 17}},
}};

}  // namespace detail

/// Unscrambled Sobol sequence in Gray-code order (the ordering of the
/// Joe-Kuo reference generator). Point 0 is the origin.
class SobolSequence {
 public:
  static constexpr unsigned kBits = 32;

  explicit SobolSequence(std::size_t dims) : dims_(dims), state_(dims, 0u), directions_(dims) {
    if (dims == 0 || dims > kSobolMaxDimensions) {
      throw std::invalid_argument("sobol: dimension " + std::to_string(dims) + " outside supported range [1, " +
                                  std::to_string(kSobolMaxDimensions) + "]");
    }
    for (unsigned i = 0; i < kBits; ++i) directions_[0][i] = 1u << (kBits - 1 - i);
    for (std::size_t dim = 1; dim < dims; ++dim) {
      const auto& init = detail::kJoeKuo[dim - 1];
      const unsigned s = init.degree;
      auto& v = directions_[dim];
      for (unsigned i = 0; i < kBits; ++i) {
        if (i < s) {
          v[i] = init.m[i] << (kBits - 1 - i);
        } else {
          v[i] = v[i - s] ^ (v[i - s] >> s);
          for (unsigned k = 1; k < s; ++k) {
            if ((init.inner >> (s - 1 - k)) & 1u) v[i] ^= v[i - k];
          }
        }
      }
    }
  }

  std::size_t dims() const noexcept { return dims_; }
  std::uint64_t index() const noexcept { return index_; }

  /// Positions the generator so that the next call to next() returns point `index`.
  void seek(std::uint64_t index) {
    if (index >= (std::uint64_t{1} << kBits)) throw std::out_of_range("sobol: index exceeds 2^32 - 1");
    const std::uint64_t gray = index ^ (index >> 1);
    for (std::size_t dim = 0; dim < dims_; ++dim) {
      std::uint32_t x = 0;
      for (unsigned bit = 0; bit < kBits; ++bit) {
        if ((gray >> bit) & 1u) x ^= directions_[dim][bit];
      }
      state_[dim] = x;
    }
    index_ = index;
  }

  Vector next() {
    if (index_ >= (std::uint64_t{1} << kBits)) throw std::out_of_range("sobol: sequence exhausted");
    Vector point(dims_);
    for (std::size_t dim = 0; dim < dims_; ++dim) point[dim] = static_cast<double>(state_[dim]) * 0x1.0p-32;
    // advance: flip the direction for the lowest zero bit of the current index
    unsigned c = 0;
    while ((index_ >> c) & 1u) ++c;
    if (c < kBits) {
      for (std::size_t dim = 0; dim < dims_; ++dim) state_[dim] ^= directions_[dim][c];
    }
    ++index_;
    return point;
  }

 private:
  std::size_t dims_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> state_;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
};

/// `count` consecutive points starting at sequence index `skip`.
inline std::vector<Vector> sobol_points(std::size_t n_dims, std::size_t count, std::uint64_t skip = 0) {
  if (count == 0) throw std::invalid_argument("sobol: count must be >= 1");
  SobolSequence seq(n_dims);
  seq.seek(skip);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(seq.next());
  return out;
}

}  // namespace dsc
