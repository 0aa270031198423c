#pragma once

// Classical stroboscopic maps on the cylinder: one period is the delta-kick
// impulse p -> p - grad V_eff(q) followed by free flight under H_i(p).

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ratchet/errors.hpp"
#include "ratchet/hilbert.hpp"
#include "ratchet/models.hpp"
#include "ratchet/parallel.hpp"
#include "ratchet/propagate.hpp"
#include "ratchet/random.hpp"

namespace ratchet {

struct PhasePoint {
  double q1 = 0.0;
  double q2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

namespace detail {

// One period without wrapping q back into the grid range.
inline PhasePoint map_step_unwrapped(const ModelSpec& model, PhasePoint pt) {
  const auto grad = v_int_gradient(model.interaction, pt.q1, pt.q2);
  pt.p1 -= kick_potential_derivative(model.kind, model.k1, pt.q1) +
           model.epsilon * grad.d1;
  pt.p2 -= kick_potential_derivative(model.kind, model.k2, pt.q2) +
           model.epsilon * grad.d2;
  if (is_rotor(model.kind)) {
    pt.q1 += pt.p1;
    pt.q2 += pt.p2;
  } else {
    pt.q1 -= model.l1 * std::sin(pt.p1);
    pt.q2 -= model.l2 * std::sin(pt.p2);
  }
  return pt;
}

}  // namespace detail

inline PhasePoint map_step(const ModelSpec& model, PhasePoint pt) {
  pt = detail::map_step_unwrapped(model, pt);
  const auto g = model.grid();
  pt.q1 = lattice::wrap(pt.q1, g);
  pt.q2 = lattice::wrap(pt.q2, g);
  return pt;
}

// |det J| of one period, by central differences with step h. For the
// non-KAM model the point must stay away from q_i = 0.
inline double jacobian_check(const ModelSpec& model, const PhasePoint& pt,
                             double h) {
  if (!(h >= 1e-7 && h <= 1e-4)) {
    throw ConfigError("jacobian step must lie in [1e-7, 1e-4]");
  }
  if (is_nonkam(model.kind) &&
      (std::abs(pt.q1) <= 2.0 * h || std::abs(pt.q2) <= 2.0 * h)) {
    throw ConfigError("jacobian check undefined on the |q| = 0 lines");
  }
  auto as_vec = [](const PhasePoint& p) {
    return Eigen::Vector4d(p.q1, p.q2, p.p1, p.p2);
  };
  auto as_point = [](const Eigen::Vector4d& v) {
    return PhasePoint{v(0), v(1), v(2), v(3)};
  };
  const Eigen::Vector4d x = as_vec(pt);
  Eigen::Matrix4d jac;
  for (int c = 0; c < 4; ++c) {
    Eigen::Vector4d plus = x, minus = x;
    plus(c) += h;
    minus(c) -= h;
    jac.col(c) =
        (as_vec(detail::map_step_unwrapped(model, as_point(plus))) -
         as_vec(detail::map_step_unwrapped(model, as_point(minus)))) /
        (2.0 * h);
  }
  return std::abs(jac.determinant());
}

struct ClassicalEnsemble {
  std::size_t points = 0;
  std::uint64_t seed = 0;
  SeriesStats mean_p1, mean_p2;
  SeriesStats energy1, energy2;          // <p_i^2 / 2>
  SeriesStats harper1, harper2;          // <L_i cos p_i>, Harper models only
  double diffusion = 0.0;                // slope of <p1^2/2> vs n
  double diffusion_r2 = 0.0;             // R^2 of that fit
};

// Least-squares line through (x, y); returns slope and R^2.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

namespace detail {

inline constexpr std::size_t kClassicalChunk = 1024;

// Chan et al. pairwise combination of running statistics.
inline void merge_into(RunningStats& into, const RunningStats& from) {
  if (from.count == 0) return;
  if (into.count == 0) {
    into = from;
    return;
  }
  const double na = static_cast<double>(into.count);
  const double nb = static_cast<double>(from.count);
  const double delta = from.mean - into.mean;
  const double n = na + nb;
  into.mean += delta * nb / n;
  into.m2 += from.m2 + delta * delta * na * nb / n;
  into.count += from.count;
}

}  // namespace detail

// M trajectories from uniform q and p = 0. Trajectory k draws its initial
// angles from a stream derived from (seed, k); chunks of fixed size are
// reduced in index order, so the result is independent of `threads`.
inline ClassicalEnsemble classical_ensemble_run(const ModelSpec& model,
                                                std::size_t points,
                                                std::size_t n_steps,
                                                std::uint64_t seed,
                                                unsigned threads = 1) {
  model.validate();
  if (points < 1000) throw ConfigError("classical ensemble needs M >= 1000");
  const auto grid = model.grid();
  const double lo = lattice::origin(grid);
  const double hi = lo + 2.0 * std::numbers::pi;
  const std::size_t len = n_steps + 1;
  const std::size_t chunks =
      (points + detail::kClassicalChunk - 1) / detail::kClassicalChunk;

  // stats[chunk][observable][step]
  constexpr int kObs = 6;
  std::vector<std::vector<std::vector<RunningStats>>> partial(
      chunks, std::vector<std::vector<RunningStats>>(
                  kObs, std::vector<RunningStats>(len)));

  parallel_for(chunks, threads, [&](std::size_t chunk) {
    auto& st = partial[chunk];
    const std::size_t begin = chunk * detail::kClassicalChunk;
    const std::size_t end = std::min(points, begin + detail::kClassicalChunk);
    for (std::size_t k = begin; k < end; ++k) {
      Stream rng(derive_seed(seed, k));
      PhasePoint pt;
      pt.q1 = rng.uniform(lo, hi);
      pt.q2 = rng.uniform(lo, hi);
      for (std::size_t n = 0; n < len; ++n) {
        if (n > 0) pt = map_step(model, pt);
        st[0][n].add(pt.p1);
        st[1][n].add(pt.p2);
        st[2][n].add(0.5 * pt.p1 * pt.p1);
        st[3][n].add(0.5 * pt.p2 * pt.p2);
        st[4][n].add(model.l1 * std::cos(pt.p1));
        st[5][n].add(model.l2 * std::cos(pt.p2));
      }
    }
  });

  std::vector<std::vector<RunningStats>> total(kObs,
                                               std::vector<RunningStats>(len));
  for (const auto& chunk : partial) {
    for (int o = 0; o < kObs; ++o) {
      for (std::size_t n = 0; n < len; ++n) {
        detail::merge_into(total[o][n], chunk[o][n]);
      }
    }
  }

  ClassicalEnsemble out;
  out.points = points;
  out.seed = seed;
  out.mean_p1 = detail::finish(total[0]);
  out.mean_p2 = detail::finish(total[1]);
  out.energy1 = detail::finish(total[2]);
  out.energy2 = detail::finish(total[3]);
  if (is_harper(model.kind)) {
    out.harper1 = detail::finish(total[4]);
    out.harper2 = detail::finish(total[5]);
  }
  if (n_steps >= 4) {
    std::vector<double> x, y;
    for (std::size_t n = n_steps / 2; n <= n_steps; ++n) {
      x.push_back(static_cast<double>(n));
      y.push_back(out.energy1.mean[n]);
    }
    const auto fit = fit_line(x, y);
    out.diffusion = fit.slope;
    out.diffusion_r2 = fit.r2;
  }
  return out;
}

}  // namespace ratchet
