#pragma once

// Momentum-space observables, the effective-kick noise kappa_n and its
// autocorrelation, and the truncation guard.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ratchet/errors.hpp"
#include "ratchet/hilbert.hpp"
#include "ratchet/models.hpp"

namespace ratchet {

// Marginal probabilities per DFT index.
inline std::vector<double> marginal(const WaveState& s, Axis axis) {
  s.require_both(Representation::momentum, "marginal");
  const std::size_t n1 = s.dim(Axis::first);
  const std::size_t n2 = s.dim(Axis::second);
  std::vector<double> f(axis == Axis::first ? n1 : n2, 0.0);
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      f[axis == Axis::first ? i1 : i2] += std::norm(s(i1, i2));
    }
  }
  return f;
}

inline double mean_p(const WaveState& s, Axis axis) {
  const auto f = marginal(s, axis);
  const std::size_t n = f.size();
  const double beta = s.beta(axis);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += (static_cast<double>(lattice::momentum_at(i, n)) + beta) * f[i];
  }
  return sum;
}

inline double mean_p1(const WaveState& s) { return mean_p(s, Axis::first); }

inline double energy_density(ModelKind kind, double l, double p) {
  return is_rotor(kind) ? 0.5 * p * p : l * std::cos(p);
}

// Model energy of one subsystem: p^2/2 for rotors, L cos p for Harper.
inline double mean_energy(const WaveState& s, Axis axis, ModelKind kind,
                          double l = 0.0) {
  const auto f = marginal(s, axis);
  const std::size_t n = f.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p =
        static_cast<double>(lattice::momentum_at(i, n)) + s.beta(axis);
    sum += energy_density(kind, l, p) * f[i];
  }
  return sum;
}

// f(p) on ascending p = m + beta.
struct MomentumDistribution {
  std::vector<long> m;
  std::vector<double> p;
  std::vector<double> f;
};

inline MomentumDistribution momentum_distribution(const WaveState& s,
                                                  Axis axis, bool scaled) {
  const auto marg = marginal(s, axis);
  const std::size_t n = marg.size();
  MomentumDistribution out;
  out.m.resize(n);
  out.p.resize(n);
  out.f.resize(n);
  const long lo = -static_cast<long>(n / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const long m = lo + static_cast<long>(k);
    out.m[k] = m;
    out.p[k] = static_cast<double>(m) + s.beta(axis);
    out.f[k] = marg[lattice::index_of(m, n)];
  }
  if (scaled) {
    const double peak = *std::max_element(out.f.begin(), out.f.end());
    if (peak > 0.0) {
      for (auto& x : out.f) x /= peak;
    }
  }
  return out;
}

// sum_m |f(m) - f(-m)| for f indexed by ascending m starting at m_lo.
// Bins whose mirror falls outside the lattice are compared against zero.
inline double distribution_asymmetry(std::span<const double> f, long m_lo) {
  const long m_hi = m_lo + static_cast<long>(f.size()) - 1;
  double sum = 0.0;
  for (long m = m_lo; m <= m_hi; ++m) {
    const double here = f[static_cast<std::size_t>(m - m_lo)];
    const double mirror =
        (-m >= m_lo && -m <= m_hi) ? f[static_cast<std::size_t>(-m - m_lo)]
                                   : 0.0;
    sum += std::abs(here - mirror);
  }
  return sum;
}

// kappa = <psi| eps sin q_j |psi>, j = source_axis. Works on a copy, so the
// state may be in any representation.
inline double kappa(const WaveState& s, Axis source_axis, double epsilon) {
  WaveState work = s;
  if (work.representation(source_axis) == Representation::momentum) {
    transform_axis(work, source_axis, Representation::position);
  }
  const std::size_t n1 = work.dim(Axis::first);
  const std::size_t n2 = work.dim(Axis::second);
  const std::size_t nj = work.dim(source_axis);
  std::vector<double> sin_q(nj);
  for (std::size_t j = 0; j < nj; ++j) {
    sin_q[j] = std::sin(lattice::position_at(j, nj, work.grid()));
  }
  double sum = 0.0;
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      const std::size_t j = source_axis == Axis::first ? i1 : i2;
      sum += sin_q[j] * std::norm(work(i1, i2));
    }
  }
  return epsilon * sum;
}

struct Autocorrelation {
  std::vector<double> centered;    // (1/(T-m)) sum (k_n - kbar)(k_{n+m} - kbar)
  std::vector<double> normalized;  // centered / centered[0]
  std::vector<double> raw;         // (1/(T-m)) sum k_n k_{n+m}
};

inline constexpr std::size_t kMinAutocorrelationLength = 32;

inline Autocorrelation autocorrelation(std::span<const double> series,
                                       std::size_t max_lag) {
  const std::size_t t = series.size();
  if (t < kMinAutocorrelationLength) {
    throw SeriesTooShort("autocorrelation needs at least " +
                         std::to_string(kMinAutocorrelationLength) +
                         " samples, got " + std::to_string(t));
  }
  max_lag = std::min(max_lag, t - 1);
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(t);

  Autocorrelation out;
  out.centered.resize(max_lag + 1);
  out.normalized.resize(max_lag + 1);
  out.raw.resize(max_lag + 1);
  for (std::size_t m = 0; m <= max_lag; ++m) {
    double c = 0.0;
    double r = 0.0;
    for (std::size_t n = 0; n + m < t; ++n) {
      c += (series[n] - mean) * (series[n + m] - mean);
      r += series[n] * series[n + m];
    }
    const double denom = static_cast<double>(t - m);
    out.centered[m] = c / denom;
    out.raw[m] = r / denom;
  }
  for (std::size_t m = 0; m <= max_lag; ++m) {
    out.normalized[m] =
        out.centered[0] > 0.0 ? out.centered[m] / out.centered[0] : 0.0;
  }
  return out;
}

namespace detail {

// True if m lies in the outermost `band` values of the lattice.
inline bool in_edge(long m, std::size_t n, std::size_t band) {
  const long lo = -static_cast<long>(n / 2);
  const long hi = static_cast<long>((n + 1) / 2) - 1;
  const long b = static_cast<long>(band);
  return m < lo + b || m > hi - b;
}

inline void check_band(const WaveState& s, std::size_t band) {
  if (band == 0 || 4 * band >= s.dim(Axis::first) ||
      4 * band >= s.dim(Axis::second)) {
    throw InvalidDimension("edge band must satisfy 0 < band < N/4");
  }
}

}  // namespace detail

// Probability in the outermost `band` momentum rows or columns of either
// axis (union of the two edge sets).
inline double edge_population(const WaveState& s, std::size_t band) {
  s.require_both(Representation::momentum, "edge_population");
  detail::check_band(s, band);
  const std::size_t n1 = s.dim(Axis::first);
  const std::size_t n2 = s.dim(Axis::second);
  double sum = 0.0;
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    const bool edge1 = detail::in_edge(lattice::momentum_at(i1, n1), n1, band);
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      if (edge1 ||
          detail::in_edge(lattice::momentum_at(i2, n2), n2, band)) {
        sum += std::norm(s(i1, i2));
      }
    }
  }
  return sum;
}

// Everything recorded per step for the current runs, from one pass over the
// grid.
struct StepObservables {
  double mean_p1 = 0.0;
  double mean_p2 = 0.0;
  double energy1 = 0.0;   // model energy
  double energy2 = 0.0;
  double kinetic1 = 0.0;  // <p^2/2>, also for Harper models
  double kinetic2 = 0.0;
  double edge_population = 0.0;
  double norm = 0.0;
};

inline StepObservables measure_step(const WaveState& s, const ModelSpec& model,
                                    std::size_t band) {
  s.require_both(Representation::momentum, "measure_step");
  detail::check_band(s, band);
  const std::size_t n1 = s.dim(Axis::first);
  const std::size_t n2 = s.dim(Axis::second);
  std::vector<double> f1(n1, 0.0), f2(n2, 0.0);
  std::vector<char> edge2(n2);
  for (std::size_t i2 = 0; i2 < n2; ++i2) {
    edge2[i2] = detail::in_edge(lattice::momentum_at(i2, n2), n2, band);
  }
  double corner = 0.0;  // edge on both axes
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    const bool edge1 = detail::in_edge(lattice::momentum_at(i1, n1), n1, band);
    const Complex* row = &s(i1, 0);
    double row_sum = 0.0;
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      const double w = std::norm(row[i2]);
      row_sum += w;
      f2[i2] += w;
      if (edge1 && edge2[i2]) corner += w;
    }
    f1[i1] = row_sum;
  }

  StepObservables o;
  double edge = -corner;
  for (std::size_t i = 0; i < n1; ++i) {
    const double p =
        static_cast<double>(lattice::momentum_at(i, n1)) + s.beta(Axis::first);
    o.norm += f1[i];
    o.mean_p1 += p * f1[i];
    o.kinetic1 += 0.5 * p * p * f1[i];
    o.energy1 += energy_density(model.kind, model.l1, p) * f1[i];
    if (detail::in_edge(lattice::momentum_at(i, n1), n1, band)) edge += f1[i];
  }
  for (std::size_t i = 0; i < n2; ++i) {
    const double p =
        static_cast<double>(lattice::momentum_at(i, n2)) + s.beta(Axis::second);
    o.mean_p2 += p * f2[i];
    o.kinetic2 += 0.5 * p * p * f2[i];
    o.energy2 += energy_density(model.kind, model.l2, p) * f2[i];
    if (edge2[i]) edge += f2[i];
  }
  o.edge_population = std::max(edge, 0.0);
  return o;
}

}  // namespace ratchet
