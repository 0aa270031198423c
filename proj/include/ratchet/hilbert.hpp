#pragma once

// Two-particle state on an N1 x N2 grid: torus positions on one side, the
// integer momentum lattice (shifted by quasi-momenta) on the other.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>

#include "ratchet/errors.hpp"
#include "ratchet/fft.hpp"

namespace ratchet {

using Complex = std::complex<double>;

// Scaled Planck constant. Fixed; configs that ask for anything else are
// rejected.
inline constexpr double kHbar = 1.0;

enum class Representation { position, momentum };

// Particle label. first is particle 1 (slow grid index), second particle 2.
enum class Axis { first = 0, second = 1 };

// zero_to_two_pi: q_j = 2 pi j / N. minus_pi_to_pi: q_j = -pi + 2 pi j / N.
enum class GridConvention { zero_to_two_pi, minus_pi_to_pi };

inline const char* to_string(Representation r) {
  return r == Representation::position ? "position" : "momentum";
}

inline const char* to_string(GridConvention g) {
  return g == GridConvention::zero_to_two_pi ? "[0,2pi)" : "[-pi,pi)";
}

inline int axis_number(Axis a) { return a == Axis::first ? 1 : 2; }

namespace lattice {

// Integer momentum stored at DFT index `index`, in
// {-floor(N/2), ..., ceil(N/2)-1}.
inline long momentum_at(std::size_t index, std::size_t n) {
  const std::size_t positive = (n + 1) / 2;
  return index < positive ? static_cast<long>(index)
                          : static_cast<long>(index) - static_cast<long>(n);
}

inline bool contains(long m, std::size_t n) {
  const long lo = -static_cast<long>(n / 2);
  const long hi = static_cast<long>((n + 1) / 2) - 1;
  return m >= lo && m <= hi;
}

inline std::size_t index_of(long m, std::size_t n) {
  return m >= 0 ? static_cast<std::size_t>(m)
                : static_cast<std::size_t>(m + static_cast<long>(n));
}

inline double origin(GridConvention g) {
  return g == GridConvention::zero_to_two_pi ? 0.0 : -std::numbers::pi;
}

inline double position_at(std::size_t j, std::size_t n, GridConvention g) {
  return origin(g) + 2.0 * std::numbers::pi * static_cast<double>(j) /
                         static_cast<double>(n);
}

// Wraps an angle into the range of the given convention.
inline double wrap(double q, GridConvention g) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double lo = origin(g);
  double r = std::fmod(q - lo, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return lo + r;
}

}  // namespace lattice

namespace detail {
struct StateAccess;
}

class WaveState {
 public:
  WaveState(std::size_t n1, std::size_t n2, double beta1, double beta2,
            GridConvention grid = GridConvention::zero_to_two_pi,
            Representation rep = Representation::momentum)
      : n_{n1, n2}, beta_{beta1, beta2}, rep_{rep, rep}, grid_(grid) {
    if (n1 < 4 || n2 < 4) {
      throw InvalidDimension("grid dimensions must be >= 4, got " +
                             std::to_string(n1) + "x" + std::to_string(n2));
    }
    amps_.assign(n1 * n2, Complex{});
  }

  std::size_t dim(Axis a) const { return n_[idx(a)]; }
  std::size_t size() const { return amps_.size(); }
  double beta(Axis a) const { return beta_[idx(a)]; }
  Representation representation(Axis a) const { return rep_[idx(a)]; }
  GridConvention grid() const { return grid_; }

  Complex& operator()(std::size_t i1, std::size_t i2) {
    return amps_[i1 * n_[1] + i2];
  }
  const Complex& operator()(std::size_t i1, std::size_t i2) const {
    return amps_[i1 * n_[1] + i2];
  }

  std::span<Complex> amplitudes() { return amps_; }
  std::span<const Complex> amplitudes() const { return amps_; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& z : amps_) s += std::norm(z);
    return s;
  }

  void require(Axis a, Representation r, const char* op) const {
    if (rep_[idx(a)] != r) {
      throw RepresentationError(std::string(op) + ": axis " +
                                std::to_string(axis_number(a)) + " is in " +
                                to_string(rep_[idx(a)]) +
                                " representation, expected " + to_string(r));
    }
  }

  void require_both(Representation r, const char* op) const {
    require(Axis::first, r, op);
    require(Axis::second, r, op);
  }

 private:
  friend struct detail::StateAccess;
  static std::size_t idx(Axis a) { return static_cast<std::size_t>(a); }

  std::size_t n_[2];
  double beta_[2];
  Representation rep_[2];
  GridConvention grid_;
  fft::ComplexBuffer amps_;
};

namespace detail {

struct StateAccess {
  static void set_representation(WaveState& s, Axis a, Representation r) {
    s.rep_[WaveState::idx(a)] = r;
  }
  static Complex* data(WaveState& s) { return s.amps_.data(); }
};

// Multiplies c(m1, m2) by (-1)^m on the requested axes. This is the phase
// e^{i m q_0} that converts the standard DFT kernel to a grid starting at
// q_0 = -pi.
inline void apply_origin_parity(WaveState& s, fft::Axes axes) {
  const std::size_t n1 = s.dim(Axis::first);
  const std::size_t n2 = s.dim(Axis::second);
  const bool use1 = axes != fft::Axes::second;
  const bool use2 = axes != fft::Axes::first;
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    const bool odd1 = use1 && (lattice::momentum_at(i1, n1) & 1L);
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      const bool odd2 = use2 && (lattice::momentum_at(i2, n2) & 1L);
      if (odd1 != odd2) s(i1, i2) = -s(i1, i2);
    }
  }
}

// Changes representation on `axes` without the 1/sqrt(N) factors. Callers
// that chain several transforms fold the combined scale into one multiply.
inline void transform_unscaled(WaveState& s, fft::Axes axes,
                               Representation target) {
  const bool shifted = s.grid() == GridConvention::minus_pi_to_pi;
  const auto dir = target == Representation::position
                       ? fft::Direction::to_position
                       : fft::Direction::to_momentum;
  if (shifted && target == Representation::position) {
    apply_origin_parity(s, axes);
  }
  fft::PlanCache::instance().execute(axes, dir, s.dim(Axis::first),
                                     s.dim(Axis::second),
                                     StateAccess::data(s));
  if (shifted && target == Representation::momentum) {
    apply_origin_parity(s, axes);
  }
  if (axes != fft::Axes::second) {
    StateAccess::set_representation(s, Axis::first, target);
  }
  if (axes != fft::Axes::first) {
    StateAccess::set_representation(s, Axis::second, target);
  }
}

inline void scale(WaveState& s, double factor) {
  for (auto& z : s.amplitudes()) z *= factor;
}

}  // namespace detail

// |m1 = 0> (x) |m2 = 0> in the momentum representation.
inline WaveState init_zero_momentum_state(
    std::size_t n1, std::size_t n2, double beta1, double beta2,
    GridConvention grid = GridConvention::zero_to_two_pi) {
  WaveState s(n1, n2, beta1, beta2, grid, Representation::momentum);
  s(lattice::index_of(0, n1), lattice::index_of(0, n2)) = 1.0;
  return s;
}

// Unitary change of basis on one axis:
//   psi(q_j) = N^{-1/2} sum_m c(m) e^{+i m q_j}
// and its inverse. Throws if the axis is already in `target`.
inline void transform_axis(WaveState& s, Axis axis, Representation target) {
  if (s.representation(axis) == target) {
    throw RepresentationError(std::string("transform_axis: axis ") +
                              std::to_string(axis_number(axis)) +
                              " already in " + to_string(target) +
                              " representation");
  }
  detail::transform_unscaled(
      s, axis == Axis::first ? fft::Axes::first : fft::Axes::second, target);
  detail::scale(s, 1.0 / std::sqrt(static_cast<double>(s.dim(axis))));
}

// Both axes at once; both must currently be in the other representation.
inline void transform_both(WaveState& s, Representation target) {
  const auto other = target == Representation::position
                         ? Representation::momentum
                         : Representation::position;
  s.require_both(other, "transform_both");
  detail::transform_unscaled(s, fft::Axes::both, target);
  detail::scale(s, 1.0 / std::sqrt(static_cast<double>(s.size())));
}

// rho_1(i, i') over DFT indices of particle 1 (momentum m = momentum_at(i)).
struct ReducedDensity {
  Eigen::MatrixXcd rho;

  long momentum(std::size_t index) const {
    return lattice::momentum_at(index, static_cast<std::size_t>(rho.rows()));
  }
  Complex at_momentum(long m, long m_prime) const {
    const auto n = static_cast<std::size_t>(rho.rows());
    return rho(static_cast<Eigen::Index>(lattice::index_of(m, n)),
               static_cast<Eigen::Index>(lattice::index_of(m_prime, n)));
  }
};

inline ReducedDensity partial_trace_1(const WaveState& s) {
  s.require_both(Representation::momentum, "partial_trace_1");
  const auto n1 = static_cast<Eigen::Index>(s.dim(Axis::first));
  const auto n2 = static_cast<Eigen::Index>(s.dim(Axis::second));
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      c(s.amplitudes().data(), n1, n2);
  return ReducedDensity{c * c.adjoint()};
}

// <phi_1(0)| rho_1 |phi_1(0)> for the zero-momentum reference state,
// without materializing rho_1.
inline double fidelity_q(const WaveState& s) {
  s.require_both(Representation::momentum, "fidelity_q");
  const std::size_t row = lattice::index_of(0, s.dim(Axis::first));
  double q = 0.0;
  for (std::size_t i2 = 0; i2 < s.dim(Axis::second); ++i2) {
    q += std::norm(s(row, i2));
  }
  return q;
}

// Singular values of the N1 x N2 amplitude matrix, descending. A product
// state has exactly one nonzero value.
inline Eigen::VectorXd schmidt_coefficients(const WaveState& s) {
  const auto n1 = static_cast<Eigen::Index>(s.dim(Axis::first));
  const auto n2 = static_cast<Eigen::Index>(s.dim(Axis::second));
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      c(s.amplitudes().data(), n1, n2);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(c);
  return svd.singularValues();
}

}  // namespace ratchet
