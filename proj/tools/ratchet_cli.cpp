// Command-line front end for the coupled kicked-system experiments.
//
//   ratchet <current|distribution|reversal|noise|sweep|classical|potential-map>
//           [--config PATH] [--seed INT] [--out DIR] [--threads INT]

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ratchet/config.hpp"
#include "ratchet/experiments.hpp"
#include "ratchet/parallel.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTruncation = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned threads = ratchet::default_thread_count();
};

ratchet::RunConfig resolve(const Options& opt) {
  auto cfg = opt.config_path.empty() ? ratchet::parse_config(ratchet::Json())
                                     : ratchet::load_config(opt.config_path);
  if (opt.seed) cfg.run.seed = *opt.seed;
  if (opt.out) cfg.output.directory = *opt.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interaction-induced directed transport in coupled kicked "
               "systems"};
  app.require_subcommand(1);

  Options opt;
  const std::vector<std::string> names{"current",   "distribution", "reversal",
                                       "noise",     "sweep",        "classical",
                                       "potential-map"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path,
                    "JSON config, or a CSV previously written by this tool");
    sub->add_option("--seed", opt.seed, "override run.seed");
    sub->add_option("--out", opt.out, "override output.directory");
    sub->add_option("--threads", opt.threads,
                    "worker threads (default: $RATCHET_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    const auto cfg = resolve(opt);
    std::vector<std::string> written;
    if (cmd == "current") written = ratchet::run_current(cfg, opt.threads);
    else if (cmd == "distribution")
      written = ratchet::run_distribution(cfg, opt.threads);
    else if (cmd == "reversal") written = ratchet::run_reversal(cfg, opt.threads);
    else if (cmd == "noise") written = ratchet::run_noise(cfg);
    else if (cmd == "sweep") written = ratchet::run_sweep(cfg, opt.threads);
    else if (cmd == "classical")
      written = ratchet::run_classical(cfg, opt.threads);
    else written = ratchet::run_potential_map(cfg);
    for (const auto& path : written) std::cout << path << '\n';
    return 0;
  } catch (const ratchet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ratchet::TruncationError& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return kExitTruncation;
  } catch (const ratchet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
