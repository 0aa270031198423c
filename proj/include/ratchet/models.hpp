#pragma once

// Coupled kicked rotor / kicked Harper / non-KAM model definitions and the
// unit-modulus phase tables used by the split-operator step.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "ratchet/errors.hpp"
#include "ratchet/fft.hpp"
#include "ratchet/hilbert.hpp"

namespace ratchet {

enum class ModelKind { ckr, ckh, nonkam_kr, nonkam_kh };
enum class InteractionKind { none, cosine, sine, modulus };

inline bool is_rotor(ModelKind k) {
  return k == ModelKind::ckr || k == ModelKind::nonkam_kr;
}
inline bool is_harper(ModelKind k) { return !is_rotor(k); }
inline bool is_nonkam(ModelKind k) {
  return k == ModelKind::nonkam_kr || k == ModelKind::nonkam_kh;
}

inline GridConvention grid_for(ModelKind k) {
  return is_nonkam(k) ? GridConvention::minus_pi_to_pi
                      : GridConvention::zero_to_two_pi;
}

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::ckr: return "ckr";
    case ModelKind::ckh: return "ckh";
    case ModelKind::nonkam_kr: return "nonkam-kr";
    case ModelKind::nonkam_kh: return "nonkam-kh";
  }
  return "?";
}

inline const char* to_string(InteractionKind k) {
  switch (k) {
    case InteractionKind::none: return "none";
    case InteractionKind::cosine: return "cosine";
    case InteractionKind::sine: return "sine";
    case InteractionKind::modulus: return "modulus";
  }
  return "?";
}

struct ModelSpec {
  ModelKind kind = ModelKind::ckr;
  double k1 = 1.5;
  double k2 = 0.8;
  double l1 = 4.0;  // Harper free-motion strengths; unused for rotors
  double l2 = 4.2;
  double epsilon = 5.0;
  InteractionKind interaction = InteractionKind::sine;
  std::size_t n1 = 1024;
  std::size_t n2 = 1024;

  GridConvention grid() const { return grid_for(kind); }

  double l(Axis a) const { return a == Axis::first ? l1 : l2; }
  double k(Axis a) const { return a == Axis::first ? k1 : k2; }
  std::size_t n(Axis a) const { return a == Axis::first ? n1 : n2; }

  // Default kick/free parameters for each model family.
  static ModelSpec defaults(ModelKind kind) {
    ModelSpec m;
    m.kind = kind;
    if (is_harper(kind)) {
      m.k1 = 2.0;
      m.k2 = 2.1;
    }
    if (is_nonkam(kind)) m.interaction = InteractionKind::modulus;
    return m;
  }

  void validate() const {
    if (n1 < 4 || n2 < 4) {
      throw InvalidDimension("grid dimensions must be >= 4");
    }
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    if (interaction == InteractionKind::modulus &&
        grid() != GridConvention::minus_pi_to_pi) {
      throw GridConventionError(
          "modulus interaction requires the [-pi,pi) grid (non-KAM models)");
    }
  }
};

// V_int(q1, q2). The modulus form -2|q1||q2| is only defined on [-pi,pi).
inline double v_int(InteractionKind kind, double q1, double q2,
                    GridConvention grid) {
  switch (kind) {
    case InteractionKind::none: return 0.0;
    case InteractionKind::cosine: return std::cos(q1 - q2);
    case InteractionKind::sine: return std::sin(q1 - q2);
    case InteractionKind::modulus:
      if (grid != GridConvention::minus_pi_to_pi) {
        throw GridConventionError(
            "modulus interaction evaluated on the [0,2pi) grid");
      }
      return -2.0 * std::abs(q1) * std::abs(q2);
  }
  return 0.0;
}

// dV_int/dq1 and dV_int/dq2, with sgn(0) = 0 for the modulus form.
struct Gradient2 {
  double d1;
  double d2;
};

inline Gradient2 v_int_gradient(InteractionKind kind, double q1, double q2) {
  switch (kind) {
    case InteractionKind::none: return {0.0, 0.0};
    case InteractionKind::cosine: {
      const double s = std::sin(q1 - q2);
      return {-s, s};
    }
    case InteractionKind::sine: {
      const double c = std::cos(q1 - q2);
      return {c, -c};
    }
    case InteractionKind::modulus: {
      auto sgn = [](double x) { return (x > 0.0) - (x < 0.0); };
      return {-2.0 * sgn(q1) * std::abs(q2), -2.0 * sgn(q2) * std::abs(q1)};
    }
  }
  return {0.0, 0.0};
}

inline double kick_potential(ModelKind kind, double k, double q) {
  return is_nonkam(kind) ? k * std::sin(q) : k * std::cos(q);
}

inline double kick_potential_derivative(ModelKind kind, double k, double q) {
  return is_nonkam(kind) ? k * std::cos(q) : -k * std::sin(q);
}

// Free-evolution eigenphase at p = m + beta: e^{-i p^2/2} for rotors,
// e^{-i L cos p} for Harper models.
inline Complex free_phase(ModelKind kind, double l, long m, double beta) {
  const double p = static_cast<double>(m) + beta;
  const double arg = is_rotor(kind) ? 0.5 * p * p : l * std::cos(p);
  return std::polar(1.0, -arg / kHbar);
}

// Position-diagonal factors. Independent of the quasi-momenta, so one copy
// is shared across an ensemble.
struct PositionPhases {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  GridConvention grid = GridConvention::zero_to_two_pi;
  fft::ComplexBuffer kick_int;     // e^{-i[V1 + V2 + eps V_int]}, row-major
  fft::ComplexBuffer interaction;  // e^{-i eps V_int}
  std::vector<Complex> kick1;      // e^{-i V1(q1)}
  std::vector<Complex> kick2;      // e^{-i V2(q2)}
};

struct PhaseTables {
  std::shared_ptr<const PositionPhases> position;
  double beta1 = 0.0;
  double beta2 = 0.0;
  std::vector<Complex> free1;  // indexed by DFT index
  std::vector<Complex> free2;

  std::size_t n1() const { return position->n1; }
  std::size_t n2() const { return position->n2; }
};

inline std::shared_ptr<const PositionPhases> build_position_phases(
    const ModelSpec& model) {
  model.validate();
  auto out = std::make_shared<PositionPhases>();
  out->n1 = model.n1;
  out->n2 = model.n2;
  out->grid = model.grid();
  out->kick1.resize(model.n1);
  out->kick2.resize(model.n2);
  std::vector<double> q1(model.n1), q2(model.n2);
  for (std::size_t j = 0; j < model.n1; ++j) {
    q1[j] = lattice::position_at(j, model.n1, out->grid);
    out->kick1[j] =
        std::polar(1.0, -kick_potential(model.kind, model.k1, q1[j]) / kHbar);
  }
  for (std::size_t j = 0; j < model.n2; ++j) {
    q2[j] = lattice::position_at(j, model.n2, out->grid);
    out->kick2[j] =
        std::polar(1.0, -kick_potential(model.kind, model.k2, q2[j]) / kHbar);
  }
  out->kick_int.resize(model.n1 * model.n2);
  out->interaction.resize(model.n1 * model.n2);
  for (std::size_t a = 0; a < model.n1; ++a) {
    const double v1 = kick_potential(model.kind, model.k1, q1[a]);
    for (std::size_t b = 0; b < model.n2; ++b) {
      const double v2 = kick_potential(model.kind, model.k2, q2[b]);
      const double vi =
          model.epsilon * v_int(model.interaction, q1[a], q2[b], out->grid);
      out->kick_int[a * model.n2 + b] = std::polar(1.0, -(v1 + v2 + vi) / kHbar);
      out->interaction[a * model.n2 + b] = std::polar(1.0, -vi / kHbar);
    }
  }
  return out;
}

inline std::vector<Complex> free_phase_vector(ModelKind kind, double l,
                                              std::size_t n, double beta) {
  std::vector<Complex> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = free_phase(kind, l, lattice::momentum_at(i, n), beta);
  }
  return v;
}

// Reuses `position` and recomputes the momentum-diagonal factors for a new
// pair of quasi-momenta.
inline PhaseTables bind_quasi_momenta(
    const ModelSpec& model, std::shared_ptr<const PositionPhases> position,
    double beta1, double beta2) {
  PhaseTables t;
  t.position = std::move(position);
  t.beta1 = beta1;
  t.beta2 = beta2;
  t.free1 = free_phase_vector(model.kind, model.l1, model.n1, beta1);
  t.free2 = free_phase_vector(model.kind, model.l2, model.n2, beta2);
  return t;
}

inline PhaseTables build_phase_tables(const ModelSpec& model, double beta1,
                                      double beta2) {
  return bind_quasi_momenta(model, build_position_phases(model), beta1,
                            beta2);
}

// V_eff(q1, q2) sampled on the model grid, row-major n1 x n2.
inline std::vector<double> effective_potential_grid(const ModelSpec& model) {
  model.validate();
  const auto g = model.grid();
  std::vector<double> v(model.n1 * model.n2);
  for (std::size_t a = 0; a < model.n1; ++a) {
    const double q1 = lattice::position_at(a, model.n1, g);
    for (std::size_t b = 0; b < model.n2; ++b) {
      const double q2 = lattice::position_at(b, model.n2, g);
      v[a * model.n2 + b] = kick_potential(model.kind, model.k1, q1) +
                            kick_potential(model.kind, model.k2, q2) +
                            model.epsilon * v_int(model.interaction, q1, q2, g);
    }
  }
  return v;
}

}  // namespace ratchet
