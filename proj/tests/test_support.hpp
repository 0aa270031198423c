#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "ratchet/hilbert.hpp"

namespace ratchet::testing {

// Random normalized state with i.i.d. complex Gaussian amplitudes.
inline WaveState random_state(std::size_t n1, std::size_t n2,
                              std::uint64_t seed,
                              Representation rep = Representation::momentum,
                              GridConvention grid =
                                  GridConvention::zero_to_two_pi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  WaveState s(n1, n2, 0.0, 0.0, grid, rep);
  double norm = 0.0;
  for (auto& z : s.amplitudes()) {
    z = {g(rng), g(rng)};
    norm += std::norm(z);
  }
  for (auto& z : s.amplitudes()) z /= std::sqrt(norm);
  return s;
}

inline double max_abs_diff(const WaveState& a, const WaveState& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d = std::max(d, std::abs(a.amplitudes()[k] - b.amplitudes()[k]));
  }
  return d;
}

}  // namespace ratchet::testing
