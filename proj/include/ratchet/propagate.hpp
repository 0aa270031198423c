#pragma once

// Floquet stepping, the mixed forward/backward reversal protocol, seeded
// quasi-momentum ensembles, and a dense-matrix reference for small grids.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ratchet/errors.hpp"
#include "ratchet/hilbert.hpp"
#include "ratchet/models.hpp"
#include "ratchet/observables.hpp"
#include "ratchet/parallel.hpp"
#include "ratchet/random.hpp"

namespace ratchet {

namespace detail {

inline void check_tables(const WaveState& s, const PhaseTables& t) {
  if (s.dim(Axis::first) != t.n1() || s.dim(Axis::second) != t.n2()) {
    throw InvalidDimension("phase tables do not match the state grid");
  }
  if (s.grid() != t.position->grid) {
    throw GridConventionError("phase tables built for a different grid");
  }
}

inline void multiply_grid(WaveState& s, const fft::ComplexBuffer& table) {
  auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= table[k];
}

// c(i1, i2) *= scale * row[i1] * col[i2]
inline void multiply_outer(WaveState& s, const std::vector<Complex>& row,
                           const std::vector<Complex>& col, double scale) {
  const std::size_t n1 = s.dim(Axis::first);
  const std::size_t n2 = s.dim(Axis::second);
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    const Complex r = scale * row[i1];
    Complex* line = &s(i1, 0);
    for (std::size_t i2 = 0; i2 < n2; ++i2) line[i2] *= r * col[i2];
  }
}

inline void multiply_rows(WaveState& s, const std::vector<Complex>& row,
                          bool conjugate) {
  const std::size_t n1 = s.dim(Axis::first);
  const std::size_t n2 = s.dim(Axis::second);
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    const Complex r = conjugate ? std::conj(row[i1]) : row[i1];
    Complex* line = &s(i1, 0);
    for (std::size_t i2 = 0; i2 < n2; ++i2) line[i2] *= r;
  }
}

}  // namespace detail

// One period of U = (U1 (x) U2) U_int with U_i = U_i^free U_i^kick. Input and
// output are in the momentum representation on both axes.
inline void step_forward(WaveState& s, const PhaseTables& t) {
  s.require_both(Representation::momentum, "step_forward");
  detail::check_tables(s, t);
  detail::transform_unscaled(s, fft::Axes::both, Representation::position);
  detail::multiply_grid(s, t.position->kick_int);
  detail::transform_unscaled(s, fft::Axes::both, Representation::momentum);
  detail::multiply_outer(s, t.free1, t.free2,
                         1.0 / static_cast<double>(s.size()));
}

// One period of (U1^{-1} (x) U2) U_int. U1^{-1} undoes the free part first,
// then the kick.
inline void step_reverse_mixed(WaveState& s, const PhaseTables& t) {
  s.require_both(Representation::momentum, "step_reverse_mixed");
  detail::check_tables(s, t);
  const std::size_t n1 = s.dim(Axis::first);
  const std::size_t n2 = s.dim(Axis::second);

  detail::transform_unscaled(s, fft::Axes::both, Representation::position);
  {
    const auto& inter = t.position->interaction;
    const auto& kick2 = t.position->kick2;
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      Complex* line = &s(i1, 0);
      const Complex* v = &inter[i1 * n2];
      for (std::size_t i2 = 0; i2 < n2; ++i2) line[i2] *= v[i2] * kick2[i2];
    }
  }
  // Particle 2's free phase and particle 1's inverse free phase are both
  // momentum-diagonal, so one two-axis transform serves both.
  detail::transform_unscaled(s, fft::Axes::both, Representation::momentum);
  {
    std::vector<Complex> inv_free1(n1);
    for (std::size_t i = 0; i < n1; ++i) inv_free1[i] = std::conj(t.free1[i]);
    const double scale =
        1.0 / (static_cast<double>(n1) * static_cast<double>(n1) *
               static_cast<double>(n2));
    detail::multiply_outer(s, inv_free1, t.free2, scale);
  }
  detail::transform_unscaled(s, fft::Axes::first, Representation::position);
  detail::multiply_rows(s, t.position->kick1, /*conjugate=*/true);
  detail::transform_unscaled(s, fft::Axes::first, Representation::momentum);
}

struct ReversalRecord {
  int tau = 0;
  std::vector<double> q;  // n = 0..2 tau
  std::vector<double> s;  // s[n-1] = Q(n) - Q(2 tau - n), n = 1..tau
};

// tau forward periods followed by tau mixed-reversal periods, starting from
// the zero-momentum product state.
inline ReversalRecord reversal_protocol(const ModelSpec& model, double beta1,
                                        double beta2, int tau) {
  if (tau < 1) throw ConfigError("reversal tau must be >= 1");
  const auto tables = build_phase_tables(model, beta1, beta2);
  auto state =
      init_zero_momentum_state(model.n1, model.n2, beta1, beta2, model.grid());
  ReversalRecord rec;
  rec.tau = tau;
  rec.q.reserve(2 * static_cast<std::size_t>(tau) + 1);
  rec.q.push_back(fidelity_q(state));
  for (int n = 0; n < tau; ++n) {
    step_forward(state, tables);
    rec.q.push_back(fidelity_q(state));
  }
  for (int n = 0; n < tau; ++n) {
    step_reverse_mixed(state, tables);
    rec.q.push_back(fidelity_q(state));
  }
  rec.s.resize(static_cast<std::size_t>(tau));
  for (int n = 1; n <= tau; ++n) {
    rec.s[static_cast<std::size_t>(n - 1)] =
        rec.q[static_cast<std::size_t>(n)] -
        rec.q[static_cast<std::size_t>(2 * tau - n)];
  }
  return rec;
}

struct EnsembleConfig {
  std::size_t n_samples = 200;
  double beta_min = -0.1;
  double beta_max = 0.1;
  std::uint64_t seed = 20240521;
};

// Quasi-momenta of sample `index`; beta1 and beta2 are drawn independently.
inline std::pair<double, double> sample_betas(const EnsembleConfig& cfg,
                                              std::size_t index) {
  Stream rng(derive_seed(cfg.seed, index));
  const double b1 = rng.uniform(cfg.beta_min, cfg.beta_max);
  const double b2 = rng.uniform(cfg.beta_min, cfg.beta_max);
  return {b1, b2};
}

// Running mean / unbiased variance, fed in a fixed order.
struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
  double stderr_of_mean() const {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count))
                     : 0.0;
  }
};

struct EnsembleOptions {
  unsigned threads = 1;
  std::size_t edge_band = 16;
  double edge_threshold = 1e-8;
  // Steps at which the beta-averaged f(p1) is recorded.
  std::set<std::size_t> snapshot_steps;
  // When set, kappa_n = <eps sin q_j> on this source axis is recorded.
  std::optional<Axis> kappa_axis;
};

struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> stderr_;

  double at(std::size_t n) const { return mean[n]; }
  double err(std::size_t n) const { return stderr_[n]; }
};

// Beta-averaged time series. Every series has n_steps + 1 entries.
struct ObservableRecord {
  ModelSpec model;
  EnsembleConfig ensemble;
  std::size_t n_steps = 0;
  std::vector<std::pair<double, double>> betas;
  SeriesStats mean_p1, mean_p2, energy1, energy2, kinetic1, kinetic2, kappa;
  std::vector<double> edge_population_max;  // worst sample per step
  // step -> unscaled f over m bins (m = m_lo ...), beta-averaged
  std::map<std::size_t, std::vector<double>> distributions;
  long m_lo = 0;
};

namespace detail {

struct SampleTrace {
  std::vector<StepObservables> steps;
  std::vector<double> kappa;
  std::map<std::size_t, std::vector<double>> distributions;
};

struct EnsembleAccumulator {
  std::vector<RunningStats> p1, p2, e1, e2, k1, k2, kap;
  std::vector<double> edge_max;
  std::map<std::size_t, std::vector<double>> dist_sum;

  explicit EnsembleAccumulator(std::size_t len)
      : p1(len), p2(len), e1(len), e2(len), k1(len), k2(len), kap(len),
        edge_max(len, 0.0) {}

  void fold(const SampleTrace& tr) {
    for (std::size_t n = 0; n < tr.steps.size(); ++n) {
      const auto& o = tr.steps[n];
      p1[n].add(o.mean_p1);
      p2[n].add(o.mean_p2);
      e1[n].add(o.energy1);
      e2[n].add(o.energy2);
      k1[n].add(o.kinetic1);
      k2[n].add(o.kinetic2);
      edge_max[n] = std::max(edge_max[n], o.edge_population);
    }
    for (std::size_t n = 0; n < tr.kappa.size(); ++n) kap[n].add(tr.kappa[n]);
    for (const auto& [step, f] : tr.distributions) {
      auto& acc = dist_sum[step];
      if (acc.empty()) acc.assign(f.size(), 0.0);
      for (std::size_t k = 0; k < f.size(); ++k) acc[k] += f[k];
    }
  }
};

inline SeriesStats finish(const std::vector<RunningStats>& v) {
  SeriesStats s;
  s.mean.reserve(v.size());
  s.stderr_.reserve(v.size());
  for (const auto& r : v) {
    s.mean.push_back(r.mean);
    s.stderr_.push_back(r.stderr_of_mean());
  }
  return s;
}

// Folds per-sample traces strictly in sample-index order, whichever worker
// finishes first.
class OrderedFold {
 public:
  explicit OrderedFold(EnsembleAccumulator& acc) : acc_(acc) {}

  void submit(std::size_t index, SampleTrace trace) {
    std::lock_guard lock(mutex_);
    pending_.emplace(index, std::move(trace));
    while (!pending_.empty() && pending_.begin()->first == next_) {
      acc_.fold(pending_.begin()->second);
      pending_.erase(pending_.begin());
      ++next_;
    }
  }

 private:
  EnsembleAccumulator& acc_;
  std::mutex mutex_;
  std::map<std::size_t, SampleTrace> pending_;
  std::size_t next_ = 0;
};

}  // namespace detail

// Evolves one trajectory per sampled (beta1, beta2) pair and averages the
// observables. Output does not depend on opts.threads.
inline ObservableRecord run_beta_ensemble(const ModelSpec& model,
                                          const EnsembleConfig& cfg,
                                          std::size_t n_steps,
                                          const EnsembleOptions& opts) {
  model.validate();
  if (cfg.n_samples == 0) throw ConfigError("ensemble needs >= 1 sample");
  const auto position = build_position_phases(model);
  const std::size_t len = n_steps + 1;
  detail::EnsembleAccumulator acc(len);
  detail::OrderedFold fold(acc);

  ObservableRecord rec;
  rec.model = model;
  rec.ensemble = cfg;
  rec.n_steps = n_steps;
  rec.m_lo = -static_cast<long>(model.n1 / 2);
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    rec.betas.push_back(sample_betas(cfg, i));
  }

  parallel_for(cfg.n_samples, opts.threads, [&](std::size_t sample) {
    const auto [b1, b2] = rec.betas[sample];
    const auto tables = bind_quasi_momenta(model, position, b1, b2);
    auto state = init_zero_momentum_state(model.n1, model.n2, b1, b2,
                                          model.grid());
    detail::SampleTrace trace;
    trace.steps.reserve(len);
    auto record = [&](std::size_t n) {
      trace.steps.push_back(measure_step(state, model, opts.edge_band));
      const double edge = trace.steps.back().edge_population;
      if (edge > opts.edge_threshold) {
        throw TruncationError(sample, n, edge);
      }
      if (opts.kappa_axis) {
        trace.kappa.push_back(kappa(state, *opts.kappa_axis, model.epsilon));
      }
      if (opts.snapshot_steps.count(n)) {
        trace.distributions[n] =
            momentum_distribution(state, Axis::first, false).f;
      }
    };
    record(0);
    for (std::size_t n = 1; n <= n_steps; ++n) {
      step_forward(state, tables);
      record(n);
    }
    fold.submit(sample, std::move(trace));
  });

  rec.mean_p1 = detail::finish(acc.p1);
  rec.mean_p2 = detail::finish(acc.p2);
  rec.energy1 = detail::finish(acc.e1);
  rec.energy2 = detail::finish(acc.e2);
  rec.kinetic1 = detail::finish(acc.k1);
  rec.kinetic2 = detail::finish(acc.k2);
  if (opts.kappa_axis) rec.kappa = detail::finish(acc.kap);
  rec.edge_population_max = acc.edge_max;
  const double inv = 1.0 / static_cast<double>(cfg.n_samples);
  for (auto& [step, f] : acc.dist_sum) {
    for (auto& x : f) x *= inv;
    rec.distributions[step] = std::move(f);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Dense reference. Builds the Floquet matrix from explicit DFT matrices and
// the scalar model functions; it shares no code with the FFT path or the
// phase tables.

inline constexpr std::size_t kDenseOracleCap = 4096;

// F(j, i) = e^{i m_i q_j} / sqrt(n): momentum index i -> position index j.
inline Eigen::MatrixXcd dense_dft_matrix(std::size_t n, GridConvention grid) {
  Eigen::MatrixXcd f(static_cast<Eigen::Index>(n),
                     static_cast<Eigen::Index>(n));
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double q = lattice::position_at(j, n, grid);
    for (std::size_t i = 0; i < n; ++i) {
      const double m = static_cast<double>(lattice::momentum_at(i, n));
      f(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          std::polar(norm, m * q);
    }
  }
  return f;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct DenseFloquet {
  Eigen::MatrixXcd matrix;  // acts on row-major (i1, i2) momentum amplitudes
  double unitarity_error = 0.0;
};

inline double unitarity_error(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd d =
      u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

inline DenseFloquet dense_floquet_oracle(const ModelSpec& model, double beta1,
                                         double beta2) {
  model.validate();
  const std::size_t dim = model.n1 * model.n2;
  if (dim > kDenseOracleCap) {
    throw DimensionCapExceeded("dense oracle limited to N1*N2 <= 4096");
  }
  const auto grid = model.grid();
  const Eigen::MatrixXcd to_position = kron(dense_dft_matrix(model.n1, grid),
                                            dense_dft_matrix(model.n2, grid));
  Eigen::VectorXcd kick(static_cast<Eigen::Index>(dim));
  Eigen::VectorXcd free(static_cast<Eigen::Index>(dim));
  for (std::size_t a = 0; a < model.n1; ++a) {
    const double q1 = lattice::position_at(a, model.n1, grid);
    const long m1 = lattice::momentum_at(a, model.n1);
    for (std::size_t b = 0; b < model.n2; ++b) {
      const double q2 = lattice::position_at(b, model.n2, grid);
      const long m2 = lattice::momentum_at(b, model.n2);
      const double v = kick_potential(model.kind, model.k1, q1) +
                       kick_potential(model.kind, model.k2, q2) +
                       model.epsilon * v_int(model.interaction, q1, q2, grid);
      const auto k = static_cast<Eigen::Index>(a * model.n2 + b);
      kick(k) = std::exp(Complex(0.0, -v / kHbar));
      free(k) = free_phase(model.kind, model.l1, m1, beta1) *
                free_phase(model.kind, model.l2, m2, beta2);
    }
  }
  DenseFloquet out;
  out.matrix = free.asDiagonal() *
               (to_position.adjoint() * (kick.asDiagonal() * to_position));
  out.unitarity_error = unitarity_error(out.matrix);
  if (out.unitarity_error > 1e-10) {
    throw Error("dense Floquet matrix failed the unitarity check");
  }
  return out;
}

// Single-particle Floquet matrix U_i = F_i^free K_i (no interaction).
inline Eigen::MatrixXcd dense_single_particle_oracle(const ModelSpec& model,
                                                     Axis axis, double beta) {
  const std::size_t n = model.n(axis);
  const auto grid = model.grid();
  const Eigen::MatrixXcd f = dense_dft_matrix(n, grid);
  Eigen::VectorXcd kick(static_cast<Eigen::Index>(n));
  Eigen::VectorXcd free(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double q = lattice::position_at(j, n, grid);
    kick(static_cast<Eigen::Index>(j)) =
        std::exp(Complex(0.0, -kick_potential(model.kind, model.k(axis), q)));
    free(static_cast<Eigen::Index>(j)) = free_phase(
        model.kind, model.l(axis), lattice::momentum_at(j, n), beta);
  }
  return free.asDiagonal() * (f.adjoint() * (kick.asDiagonal() * f));
}

}  // namespace ratchet
