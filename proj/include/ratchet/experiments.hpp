#pragma once

// Experiment drivers behind the command-line subcommands. Each one runs the
// simulation described by a RunConfig and writes CSV files whose header
// echoes the full resolved configuration.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ratchet/classical.hpp"
#include "ratchet/config.hpp"
#include "ratchet/csv.hpp"
#include "ratchet/fft.hpp"
#include "ratchet/models.hpp"
#include "ratchet/observables.hpp"
#include "ratchet/propagate.hpp"

namespace ratchet {

// Creates the output directory and applies the FFT planning mode. With
// measured plans, wisdom is loaded from and saved to the output directory so
// a rerun into the same directory repeats the same plans bit for bit.
class OutputSession {
 public:
  explicit OutputSession(const RunConfig& cfg)
      : dir_(cfg.output.directory), planning_(cfg.run.planning) {
    std::filesystem::create_directories(dir_);
    auto& cache = fft::PlanCache::instance();
    cache.set_planning(planning_);
    if (planning_ == fft::Planning::measure &&
        std::filesystem::exists(wisdom_path())) {
      cache.import_wisdom(wisdom_path());
    }
  }

  ~OutputSession() {
    if (planning_ == fft::Planning::measure) {
      fft::PlanCache::instance().export_wisdom(wisdom_path());
    }
  }

  OutputSession(const OutputSession&) = delete;
  OutputSession& operator=(const OutputSession&) = delete;

  std::string file(const std::string& prefix, const std::string& stem) const {
    return (dir_ / (prefix + "_" + stem + ".csv")).string();
  }

 private:
  std::string wisdom_path() const { return (dir_ / "fftw.wisdom").string(); }

  std::filesystem::path dir_;
  fft::Planning planning_;
};

inline void write_header(CsvWriter& csv, const RunConfig& cfg,
                         const std::string& subcommand,
                         const ModelSpec& model) {
  csv.comment("ratchet", subcommand);
  csv.comment("model.kind", to_string(model.kind));
  csv.comment("model.interaction", to_string(model.interaction));
  csv.comment("model.k1", format_number(model.k1));
  csv.comment("model.k2", format_number(model.k2));
  if (is_harper(model.kind)) {
    csv.comment("model.l1", format_number(model.l1));
    csv.comment("model.l2", format_number(model.l2));
  }
  csv.comment("model.epsilon", format_number(model.epsilon));
  csv.comment("grid", to_string(model.grid()));
  csv.comment("grid.n1", std::to_string(model.n1));
  csv.comment("grid.n2", std::to_string(model.n2));
  csv.comment("run.seed", std::to_string(cfg.run.seed));
  csv.comment("config", to_json(cfg).dump());
}

inline EnsembleOptions ensemble_options(const RunConfig& cfg,
                                        unsigned threads) {
  EnsembleOptions o;
  o.threads = threads;
  o.edge_band = cfg.edge_band();
  o.edge_threshold = cfg.run.edge_threshold;
  return o;
}

inline ModelSpec with_interaction(ModelSpec m, InteractionKind k) {
  m.interaction = k;
  return m;
}

inline void write_current_csv(const std::string& path, const RunConfig& cfg,
                              const ObservableRecord& rec) {
  CsvWriter csv(path);
  write_header(csv, cfg, "current", rec.model);
  csv.comment("edge_population", "maximum over beta samples");
  std::vector<std::string> cols = cfg.output.observables;
  if (cols.empty()) cols = current_observable_names();
  std::vector<std::string> header{"n"};
  header.insert(header.end(), cols.begin(), cols.end());
  csv.columns(header);
  for (std::size_t n = 0; n <= rec.n_steps; ++n) {
    std::vector<std::string> row{std::to_string(n)};
    for (const auto& c : cols) {
      double v = 0.0;
      if (c == "mean_p1") v = rec.mean_p1.at(n);
      else if (c == "stderr_p1") v = rec.mean_p1.err(n);
      else if (c == "mean_p2") v = rec.mean_p2.at(n);
      else if (c == "stderr_p2") v = rec.mean_p2.err(n);
      else if (c == "energy1") v = rec.energy1.at(n);
      else if (c == "energy2") v = rec.energy2.at(n);
      else if (c == "edge_population") v = rec.edge_population_max[n];
      else if (c == "kinetic1") v = rec.kinetic1.at(n);
      else if (c == "kinetic2") v = rec.kinetic2.at(n);
      row.push_back(format_number(v));
    }
    csv.row(row);
  }
}

// One beta-averaged current file per requested interaction kind.
inline std::vector<std::string> run_current(const RunConfig& cfg,
                                            unsigned threads) {
  OutputSession session(cfg);
  std::vector<std::string> written;
  for (auto kind : cfg.run.interactions) {
    const auto model = with_interaction(cfg.model, kind);
    const auto rec = run_beta_ensemble(model, cfg.ensemble(), cfg.run.n_steps,
                                       ensemble_options(cfg, threads));
    const auto path = session.file(cfg.output.prefix,
                                   std::string("current_") + to_string(kind));
    write_current_csv(path, cfg, rec);
    written.push_back(path);
  }
  return written;
}

inline std::vector<std::string> run_distribution(const RunConfig& cfg,
                                                 unsigned threads) {
  OutputSession session(cfg);
  auto opts = ensemble_options(cfg, threads);
  opts.snapshot_steps.insert(cfg.run.snapshots.begin(),
                             cfg.run.snapshots.end());
  const auto rec = run_beta_ensemble(cfg.model, cfg.ensemble(),
                                     cfg.run.n_steps, opts);
  const auto path = session.file(cfg.output.prefix, "distribution");
  const auto asym_path =
      session.file(cfg.output.prefix, "distribution_asymmetry");
  CsvWriter csv(path);
  write_header(csv, cfg, "distribution", cfg.model);
  csv.comment("p", "integer momentum bin m; beta-averaged over samples");
  csv.columns({"n", "p", "f_scaled", "f"});
  CsvWriter asym(asym_path);
  write_header(asym, cfg, "distribution", cfg.model);
  asym.columns({"n", "asymmetry"});
  for (const auto& [step, f] : rec.distributions) {
    const double peak = *std::max_element(f.begin(), f.end());
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (f[k] == 0.0) continue;
      csv.row({std::to_string(step),
               std::to_string(rec.m_lo + static_cast<long>(k)),
               format_number(f[k] / peak), format_number(f[k])});
    }
    asym.row({std::to_string(step),
              format_number(distribution_asymmetry(f, rec.m_lo))});
  }
  return {path, asym_path};
}

// Q(n) for the mixed reversal protocol, either at the fixed run.beta or
// averaged over the quasi-momentum ensemble.
inline ReversalRecord reversal_for(const RunConfig& cfg, unsigned threads) {
  if (!cfg.run.reversal_average) {
    return reversal_protocol(cfg.model, cfg.run.beta1, cfg.run.beta2,
                             cfg.run.tau);
  }
  const auto ens = cfg.ensemble();
  std::vector<ReversalRecord> per(ens.n_samples);
  parallel_for(ens.n_samples, threads, [&](std::size_t i) {
    const auto [b1, b2] = sample_betas(ens, i);
    per[i] = reversal_protocol(cfg.model, b1, b2, cfg.run.tau);
  });
  ReversalRecord avg;
  avg.tau = cfg.run.tau;
  avg.q.assign(per.front().q.size(), 0.0);
  for (const auto& r : per) {
    for (std::size_t n = 0; n < r.q.size(); ++n) avg.q[n] += r.q[n];
  }
  for (auto& x : avg.q) x /= static_cast<double>(per.size());
  avg.s.resize(static_cast<std::size_t>(avg.tau));
  for (int n = 1; n <= avg.tau; ++n) {
    avg.s[static_cast<std::size_t>(n - 1)] =
        avg.q[static_cast<std::size_t>(n)] -
        avg.q[static_cast<std::size_t>(2 * avg.tau - n)];
  }
  return avg;
}

inline std::vector<std::string> run_reversal(const RunConfig& cfg,
                                             unsigned threads) {
  OutputSession session(cfg);
  const auto rec = reversal_for(cfg, threads);
  const auto path = session.file(cfg.output.prefix, "reversal");
  CsvWriter csv(path);
  write_header(csv, cfg, "reversal", cfg.model);
  csv.comment("tau", std::to_string(rec.tau));
  csv.columns({"n", "Q", "S"});
  for (std::size_t n = 0; n < rec.q.size(); ++n) {
    const bool has_s = n >= 1 && n <= static_cast<std::size_t>(rec.tau);
    csv.row({std::to_string(n), format_number(rec.q[n]),
             has_s ? format_number(rec.s[n - 1]) : std::string()});
  }
  return {path};
}

struct NoiseRecord {
  std::vector<double> kappa;  // n = 0..n_steps
  Autocorrelation correlation;
  double max_edge_population = 0.0;
};

// kappa_n for a single trajectory at run.beta, and its autocorrelation.
inline NoiseRecord noise_for(const RunConfig& cfg) {
  const auto& m = cfg.model;
  const auto tables = build_phase_tables(m, cfg.run.beta1, cfg.run.beta2);
  auto state = init_zero_momentum_state(m.n1, m.n2, cfg.run.beta1,
                                        cfg.run.beta2, m.grid());
  NoiseRecord rec;
  const std::size_t band = cfg.edge_band();
  for (std::size_t n = 0; n <= cfg.run.n_steps; ++n) {
    if (n > 0) step_forward(state, tables);
    const double edge = edge_population(state, band);
    if (edge > cfg.run.edge_threshold) throw TruncationError(0, n, edge);
    rec.max_edge_population = std::max(rec.max_edge_population, edge);
    rec.kappa.push_back(kappa(state, cfg.run.kappa_axis, m.epsilon));
  }
  rec.correlation = autocorrelation(rec.kappa, cfg.run.max_lag);
  return rec;
}

inline std::vector<std::string> run_noise(const RunConfig& cfg) {
  OutputSession session(cfg);
  const auto rec = noise_for(cfg);
  const auto path = session.file(cfg.output.prefix, "noise");
  CsvWriter csv(path);
  write_header(csv, cfg, "noise", cfg.model);
  csv.comment("C_0", format_number(rec.correlation.centered[0]));
  csv.comment("columns",
              "C, C_normalized, C_raw are indexed by lag m = n");
  csv.columns({"n", "kappa", "C", "C_normalized", "C_raw"});
  const auto& c = rec.correlation;
  for (std::size_t n = 0; n < rec.kappa.size(); ++n) {
    std::vector<std::string> row{std::to_string(n),
                                 format_number(rec.kappa[n])};
    if (n < c.centered.size()) {
      row.push_back(format_number(c.centered[n]));
      row.push_back(format_number(c.normalized[n]));
      row.push_back(format_number(c.raw[n]));
    } else {
      row.insert(row.end(), 3, std::string());
    }
    csv.row(row);
  }
  return {path};
}

struct SweepPoint {
  double epsilon = 0.0;
  double mean_p1 = 0.0;
  double stderr_p1 = 0.0;
  double max_edge_population = 0.0;
};

inline std::vector<SweepPoint> sweep_for(const RunConfig& cfg,
                                         unsigned threads) {
  std::vector<SweepPoint> points;
  const std::size_t n = cfg.run.measure_step;
  for (double eps : cfg.run.epsilons) {
    ModelSpec m = cfg.model;
    m.epsilon = eps;
    const auto rec = run_beta_ensemble(m, cfg.ensemble(), n,
                                       ensemble_options(cfg, threads));
    double edge = 0.0;
    for (double e : rec.edge_population_max) edge = std::max(edge, e);
    points.push_back({eps, rec.mean_p1.at(n), rec.mean_p1.err(n), edge});
  }
  return points;
}

inline std::vector<std::string> run_sweep(const RunConfig& cfg,
                                          unsigned threads) {
  OutputSession session(cfg);
  const auto points = sweep_for(cfg, threads);
  const auto path = session.file(cfg.output.prefix, "sweep");
  CsvWriter csv(path);
  write_header(csv, cfg, "sweep", cfg.model);
  csv.comment("measure_step", std::to_string(cfg.run.measure_step));
  csv.columns({"epsilon", "mean_p1", "stderr_p1", "edge_population"});
  for (const auto& p : points) {
    csv.row({format_number(p.epsilon), format_number(p.mean_p1),
             format_number(p.stderr_p1),
             format_number(p.max_edge_population)});
  }
  return {path};
}

inline std::vector<std::string> run_classical(const RunConfig& cfg,
                                              unsigned threads) {
  OutputSession session(cfg);
  const auto ens =
      classical_ensemble_run(cfg.model, cfg.run.classical_points,
                             cfg.run.n_steps, cfg.run.seed, threads);
  const auto path = session.file(cfg.output.prefix, "classical");
  CsvWriter csv(path);
  write_header(csv, cfg, "classical", cfg.model);
  csv.comment("points", std::to_string(ens.points));
  csv.comment("D_cl", format_number(ens.diffusion));
  csv.comment("D_cl.r2", format_number(ens.diffusion_r2));
  std::vector<std::string> cols{"n",          "mean_p1",   "stderr",
                                "mean_energy", "mean_p2",  "stderr_p2",
                                "mean_energy2"};
  const bool harper = is_harper(cfg.model.kind);
  if (harper) {
    cols.push_back("harper_energy1");
    cols.push_back("harper_energy2");
  }
  csv.columns(cols);
  for (std::size_t n = 0; n <= cfg.run.n_steps; ++n) {
    std::vector<std::string> row{
        std::to_string(n),
        format_number(ens.mean_p1.at(n)),
        format_number(ens.mean_p1.err(n)),
        format_number(ens.energy1.at(n)),
        format_number(ens.mean_p2.at(n)),
        format_number(ens.mean_p2.err(n)),
        format_number(ens.energy2.at(n))};
    if (harper) {
      row.push_back(format_number(ens.harper1.at(n)));
      row.push_back(format_number(ens.harper2.at(n)));
    }
    csv.row(row);
  }
  return {path};
}

inline std::vector<std::string> run_potential_map(const RunConfig& cfg) {
  OutputSession session(cfg);
  ModelSpec m = cfg.model;
  m.n1 = m.n2 = cfg.run.map_points;
  const auto v = effective_potential_grid(m);
  const auto path = session.file(cfg.output.prefix, "potential_map");
  CsvWriter csv(path);
  write_header(csv, cfg, "potential-map", m);
  csv.columns({"q1", "q2", "V_eff"});
  for (std::size_t a = 0; a < m.n1; ++a) {
    const double q1 = lattice::position_at(a, m.n1, m.grid());
    for (std::size_t b = 0; b < m.n2; ++b) {
      const double q2 = lattice::position_at(b, m.n2, m.grid());
      csv.row({format_number(q1), format_number(q2),
               format_number(v[a * m.n2 + b])});
    }
  }
  return {path};
}

}  // namespace ratchet
