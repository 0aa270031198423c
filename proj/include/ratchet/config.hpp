#pragma once

// Run configuration: a JSON document with model / run / output blocks.
// Unknown keys are rejected; omitted keys take model-dependent defaults.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ratchet/errors.hpp"
#include "ratchet/fft.hpp"
#include "ratchet/models.hpp"
#include "ratchet/propagate.hpp"

namespace ratchet {

using Json = nlohmann::ordered_json;

struct RunSettings {
  std::size_t n_steps = 200;
  std::size_t samples = 200;
  double beta_min = -0.1;
  double beta_max = 0.1;
  std::uint64_t seed = 20240521;
  std::vector<std::size_t> snapshots;  // distribution snapshot steps
  int tau = 50;
  std::vector<InteractionKind> interactions;  // current: one file each
  std::vector<double> epsilons{0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 10.0};
  std::size_t measure_step = 200;  // sweep measurement time
  std::size_t classical_points = 100000;
  std::size_t edge_band = 0;  // 0: N/32
  double edge_threshold = 1e-8;
  Axis kappa_axis = Axis::second;
  std::size_t max_lag = 100;
  double beta1 = 0.0;  // fixed quasi-momenta for reversal and noise runs
  double beta2 = 0.0;
  bool reversal_average = false;
  std::size_t map_points = 128;  // potential-map grid per axis
  fft::Planning planning = fft::Planning::estimate;
};

struct OutputSettings {
  std::string directory = "out";
  std::string prefix;
  std::vector<std::string> observables;  // current CSV columns; empty = all
};

struct RunConfig {
  ModelSpec model;
  RunSettings run;
  OutputSettings output;

  std::size_t edge_band() const {
    if (run.edge_band != 0) return run.edge_band;
    return std::max<std::size_t>(1, std::min(model.n1, model.n2) / 32);
  }

  EnsembleConfig ensemble() const {
    return EnsembleConfig{run.samples, run.beta_min, run.beta_max, run.seed};
  }
};

inline const std::vector<std::string>& current_observable_names() {
  static const std::vector<std::string> names{
      "mean_p1",  "stderr_p1", "mean_p2",        "stderr_p2",
      "energy1",  "energy2",   "edge_population", "kinetic1",
      "kinetic2"};
  return names;
}

inline std::vector<std::size_t> default_snapshots(std::size_t n_steps) {
  std::vector<std::size_t> s;
  for (std::size_t n = 0; n <= n_steps; n += (n < 100 ? 1 : 10)) {
    s.push_back(n);
  }
  return s;
}

namespace detail {

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "ckr") return ModelKind::ckr;
  if (s == "ckh") return ModelKind::ckh;
  if (s == "nonkam-kr") return ModelKind::nonkam_kr;
  if (s == "nonkam-kh") return ModelKind::nonkam_kh;
  throw ConfigError("unknown model kind '" + s + "'");
}

inline InteractionKind parse_interaction(const std::string& s) {
  if (s == "none") return InteractionKind::none;
  if (s == "cosine") return InteractionKind::cosine;
  if (s == "sine") return InteractionKind::sine;
  if (s == "modulus") return InteractionKind::modulus;
  throw ConfigError("unknown interaction kind '" + s + "'");
}

inline void reject_unknown(const Json& block, const std::string& where,
                           const std::set<std::string>& allowed) {
  if (!block.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : block.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + where + "." + key + "'");
    }
  }
}

template <class T>
T get(const Json& block, const char* key, T fallback,
      const std::string& where) {
  if (!block.contains(key)) return fallback;
  try {
    return block.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace detail

// Resolves defaults and validates. `doc` may be empty.
inline RunConfig parse_config(const Json& doc) {
  detail::reject_unknown(doc.is_null() ? Json::object() : doc, "config",
                         {"model", "run", "output"});
  const Json model = doc.is_null() ? Json::object()
                                   : doc.value("model", Json::object());
  const Json run = doc.is_null() ? Json::object()
                                 : doc.value("run", Json::object());
  const Json out = doc.is_null() ? Json::object()
                                 : doc.value("output", Json::object());
  detail::reject_unknown(model, "model",
                         {"kind", "k1", "k2", "l1", "l2", "epsilon",
                          "interaction", "hbar"});
  detail::reject_unknown(
      run, "run",
      {"n_steps", "n1", "n2", "samples", "beta_min", "beta_max", "seed",
       "snapshots", "tau", "interactions", "epsilons", "measure_step",
       "classical_points", "edge_band", "edge_threshold", "kappa_axis",
       "max_lag", "beta", "reversal_average", "map_points", "fft_planning"});
  detail::reject_unknown(out, "output", {"directory", "prefix", "observables"});

  RunConfig cfg;
  const auto kind = detail::parse_model_kind(
      detail::get<std::string>(model, "kind", "ckr", "model"));
  cfg.model = ModelSpec::defaults(kind);
  auto& m = cfg.model;
  m.k1 = detail::get(model, "k1", m.k1, "model");
  m.k2 = detail::get(model, "k2", m.k2, "model");
  m.l1 = detail::get(model, "l1", m.l1, "model");
  m.l2 = detail::get(model, "l2", m.l2, "model");
  m.epsilon = detail::get(model, "epsilon", m.epsilon, "model");
  m.interaction = detail::parse_interaction(detail::get<std::string>(
      model, "interaction", to_string(m.interaction), "model"));
  if (detail::get(model, "hbar", 1.0, "model") != kHbar) {
    throw ConfigError("model.hbar: only hbar = 1 is supported");
  }

  auto& r = cfg.run;
  if (is_nonkam(kind)) r.edge_threshold = 1.0;
  m.n1 = detail::get<std::size_t>(run, "n1", m.n1, "run");
  m.n2 = detail::get<std::size_t>(run, "n2", m.n2, "run");
  r.n_steps = detail::get(run, "n_steps", r.n_steps, "run");
  r.samples = detail::get(run, "samples", r.samples, "run");
  r.beta_min = detail::get(run, "beta_min", r.beta_min, "run");
  r.beta_max = detail::get(run, "beta_max", r.beta_max, "run");
  r.seed = detail::get(run, "seed", r.seed, "run");
  r.snapshots = detail::get(run, "snapshots", default_snapshots(r.n_steps),
                            "run");
  r.tau = detail::get(run, "tau", r.tau, "run");
  r.epsilons = detail::get(run, "epsilons", r.epsilons, "run");
  r.measure_step = detail::get(run, "measure_step", r.measure_step, "run");
  r.classical_points =
      detail::get(run, "classical_points", r.classical_points, "run");
  r.edge_band = detail::get(run, "edge_band", r.edge_band, "run");
  r.edge_threshold = detail::get(run, "edge_threshold", r.edge_threshold, "run");
  r.max_lag = detail::get(run, "max_lag", r.max_lag, "run");
  r.reversal_average =
      detail::get(run, "reversal_average", r.reversal_average, "run");
  r.map_points = detail::get(run, "map_points", r.map_points, "run");

  const int kappa_axis = detail::get(run, "kappa_axis", 2, "run");
  if (kappa_axis != 1 && kappa_axis != 2) {
    throw ConfigError("run.kappa_axis must be 1 or 2");
  }
  r.kappa_axis = kappa_axis == 1 ? Axis::first : Axis::second;

  const auto beta =
      detail::get(run, "beta", std::vector<double>{0.0, 0.0}, "run");
  if (beta.size() != 2) throw ConfigError("run.beta must have two entries");
  r.beta1 = beta[0];
  r.beta2 = beta[1];

  const auto planning =
      detail::get<std::string>(run, "fft_planning", "estimate", "run");
  if (planning == "measure") {
    r.planning = fft::Planning::measure;
  } else if (planning == "estimate") {
    r.planning = fft::Planning::estimate;
  } else {
    throw ConfigError("run.fft_planning must be 'measure' or 'estimate'");
  }

  const auto interactions = detail::get(
      run, "interactions",
      std::vector<std::string>{to_string(m.interaction)}, "run");
  r.interactions.clear();
  for (const auto& s : interactions) {
    r.interactions.push_back(detail::parse_interaction(s));
  }

  auto& o = cfg.output;
  o.directory = detail::get(out, "directory", o.directory, "output");
  o.prefix = detail::get<std::string>(out, "prefix", to_string(kind), "output");
  o.observables = detail::get(out, "observables", o.observables, "output");
  for (const auto& name : o.observables) {
    const auto& known = current_observable_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("unknown observable '" + name + "'");
    }
  }

  // Validation.
  try {
    m.validate();
    for (auto k : r.interactions) {
      ModelSpec probe = m;
      probe.interaction = k;
      probe.validate();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (r.samples == 0) throw ConfigError("run.samples must be >= 1");
  if (!(r.beta_min <= r.beta_max)) {
    throw ConfigError("run.beta_min must not exceed run.beta_max");
  }
  if (r.tau < 1) throw ConfigError("run.tau must be >= 1");
  for (double e : r.epsilons) {
    if (!(e >= 0.0)) throw ConfigError("run.epsilons must be >= 0");
  }
  for (auto n : r.snapshots) {
    if (n > r.n_steps) {
      throw ConfigError("run.snapshots entries must not exceed run.n_steps");
    }
  }
  const std::size_t band = cfg.edge_band();
  if (4 * band >= std::min(m.n1, m.n2)) {
    throw ConfigError("run.edge_band must be < N/4");
  }
  if (r.map_points < 4) throw ConfigError("run.map_points must be >= 4");
  if (r.classical_points < 1000) {
    throw ConfigError("run.classical_points must be >= 1000");
  }
  return cfg;
}

// Fully resolved configuration; feeding it back to parse_config yields the
// same RunConfig apart from output.directory, which is not echoed.
inline Json to_json(const RunConfig& cfg) {
  Json j;
  const auto& m = cfg.model;
  j["model"] = {{"kind", to_string(m.kind)},
                {"k1", m.k1},
                {"k2", m.k2},
                {"l1", m.l1},
                {"l2", m.l2},
                {"epsilon", m.epsilon},
                {"interaction", to_string(m.interaction)},
                {"hbar", kHbar}};
  const auto& r = cfg.run;
  std::vector<std::string> inter;
  for (auto k : r.interactions) inter.emplace_back(to_string(k));
  j["run"] = {{"n_steps", r.n_steps},
              {"n1", m.n1},
              {"n2", m.n2},
              {"samples", r.samples},
              {"beta_min", r.beta_min},
              {"beta_max", r.beta_max},
              {"seed", r.seed},
              {"snapshots", r.snapshots},
              {"tau", r.tau},
              {"interactions", inter},
              {"epsilons", r.epsilons},
              {"measure_step", r.measure_step},
              {"classical_points", r.classical_points},
              {"edge_band", cfg.edge_band()},
              {"edge_threshold", r.edge_threshold},
              {"kappa_axis", axis_number(r.kappa_axis)},
              {"max_lag", r.max_lag},
              {"beta", {r.beta1, r.beta2}},
              {"reversal_average", r.reversal_average},
              {"map_points", r.map_points},
              {"fft_planning",
               r.planning == fft::Planning::measure ? "measure" : "estimate"}};
  j["output"] = {{"prefix", cfg.output.prefix},
                 {"observables", cfg.output.observables}};
  return j;
}

inline constexpr const char* kConfigEchoTag = "# config = ";

// Reads a JSON config file, or the config echoed in the header of a CSV
// written by this tool.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string tag = kConfigEchoTag;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '#') {
    const auto pos = text.find(tag);
    if (pos == std::string::npos) {
      throw ConfigError("'" + path + "' has no echoed config line");
    }
    const auto end = text.find('\n', pos);
    const auto body = text.substr(pos + tag.size(), end - pos - tag.size());
    try {
      return parse_config(Json::parse(body));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed echoed config: ") + e.what());
    }
  }
  try {
    return parse_config(text.empty() ? Json() : Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

}  // namespace ratchet
