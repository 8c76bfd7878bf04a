#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "netspill/cli.hpp"

#ifndef NETSPILL_VERSION
#define NETSPILL_VERSION "0.0.0"
#endif

namespace netspill::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spillover analysis on two-layer contact networks", "netspill"};
  app.set_version_flag("--version", NETSPILL_VERSION);

  std::string config_path;
  std::string out_dir;
  std::string seed;
  std::string threads;
  std::string realizations;
  std::string grid;
  std::string omegas;
  std::string tau2_grid;
  std::vector<std::string> sets;

  app.add_option("--config", config_path, "Key-value or JSON configuration (a run manifest also works)");
  app.add_option("--out", out_dir, "Output directory (output_dir)");
  app.add_option("--seed", seed, "Master seed (master_seed)");
  app.add_option("--threads", threads, "Worker threads, 0 = all cores");
  app.add_option("--realizations", realizations, "Realizations per estimate");
  app.add_option("--grid", grid, "Comma-separated sweep grid");
  app.add_option("--omegas", omegas, "Comma-separated coupling probabilities for threshold-curve");
  app.add_option("--tau2-grid", tau2_grid, "Comma-separated normalised layer-2 strengths for threshold-curve");
  app.add_option("--set", sets, "Override any configuration key: --set key=value")->take_all();

  const std::map<std::string, std::string> descriptions{
      {"threshold-curve", "Normalised layer-1 threshold against layer-2 strength per coupling level"},
      {"meanfield", "Node-level mean-field trajectories"},
      {"simulate", "One stochastic realization"},
      {"sweep-links", "Spillover probability over inter-link fractions"},
      {"sweep-beta", "Spillover probability over the inter-layer infection rate"},
      {"boundary", "Critical beta12 per link fraction"},
      {"calibrate", "Reservoir rate giving a target mean outbreak size"},
      {"topology-compare", "Minimal spillover link counts across calibrated topologies"},
  };
  std::string command;
  for (const auto& name : command_names()) {
    app.add_subcommand(name, descriptions.at(name))->fallthrough()->callback([&command, name] { command = name; });
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  RawConfig overrides;
  for (const auto& item : sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      err << "error: --set expects key=value, got \"" << item << "\"\n";
      return kConfigError;
    }
    overrides[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto flag = [&](const std::string& key, const std::string& value) {
    if (!value.empty()) overrides[key] = value;
  };
  flag("command", command);
  flag("output_dir", out_dir);
  flag("master_seed", seed);
  flag("threads", threads);
  flag("realizations", realizations);
  flag("grid", grid);
  flag("omegas", omegas);
  flag("tau2_grid", tau2_grid);

  try {
    const RunConfig cfg = config_path.empty() ? parse_config(overrides) : parse_config(config_path, overrides);
    dispatch(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kSuccess;
}

}  // namespace netspill::cli
