#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netspill/graph.hpp"
#include "netspill/params.hpp"
#include "netspill/spillover.hpp"
#include "netspill/stochastic.hpp"

namespace netspill::cli {

/// Invalid run configuration; key() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2, kNumericError = 3, kIoError = 4 };

enum class Command {
  threshold_curve,
  meanfield,
  simulate,
  sweep_links,
  sweep_beta,
  boundary,
  calibrate,
  topology_compare,
};

std::string command_name(Command c);
std::optional<Command> parse_command(const std::string& name);
const std::vector<std::string>& command_names();

/// Generator or file behind one layer, e.g. "ws:500,20,0.2", "gnm:1000,3255",
/// "er:500,0.02", "ba:1000,3", "ba:1000,3,2957", "file:path.edges".
struct NetworkSpec {
  std::string kind;
  std::vector<double> args;
  std::string path;
  std::string text;
};

/// "probability:w", "count:m", "fraction:f", "hubs:count,num_hubs" or "file:path".
struct CouplingSpec {
  enum class Kind { probability, count, fraction, hubs, file };
  Kind kind = Kind::count;
  double value = 0.0;
  NodeId num_hubs = 0;
  std::string path;
  std::string text;
};

NetworkSpec parse_network_spec(const std::string& key, const std::string& text);
CouplingSpec parse_coupling_spec(const std::string& key, const std::string& text);
Graph build_network(const NetworkSpec& spec, Seed seed);

/// Flat key/value configuration, values kept as written.
using RawConfig = std::map<std::string, std::string>;

struct RunConfig {
  Command command = Command::threshold_curve;
  Seed master_seed = 0;
  std::filesystem::path output_dir = "out";
  unsigned threads = 0;
  std::size_t realizations = 2000;

  std::optional<NetworkSpec> layer1;
  std::optional<NetworkSpec> layer2;
  std::optional<Seed> network_seed;
  bool same_instance = false;
  std::optional<CouplingSpec> coupling;

  EpidemicParams params;
  bool constrained = false;

  std::vector<double> omegas;
  std::vector<double> tau2_grid;

  std::optional<double> tau1;
  std::optional<double> tau2;
  double t_end = 30.0;
  double dt = 0.01;
  double init_fraction = 0.01;
  bool per_node = false;
  std::size_t sample_every = 1;

  stochastic::Layer seed_layer = stochastic::Layer::second;
  std::uint64_t seed_count = 10;
  std::optional<std::vector<stochastic::NodeRef>> seeds;
  double t_max = std::numeric_limits<double>::infinity();
  bool record_events = false;

  std::vector<double> grid;
  spillover::CouplingMode coupling_mode = spillover::CouplingMode::random;
  NodeId num_hubs = 5;
  spillover::CouplingDraw coupling_draw = spillover::CouplingDraw::redraw;
  std::uint64_t size_threshold = 3;
  double p_threshold = 0.1;
  std::uint64_t link_count = 1000;

  double beta12_lo = 0.001;
  double beta12_hi = 1.0;
  int bisection_steps = 12;

  double target_lo = 51.0;
  double target_hi = 53.0;

  std::vector<std::pair<std::string, NetworkSpec>> topologies;

  /// Validated source values, written to the run manifest.
  RawConfig raw;

  /// Seed of generated layer graphs: network_seed if set, otherwise derived from master_seed.
  Seed graph_seed() const noexcept;
};

/// Reads "key = value" lines (blank lines and '#' comments ignored) or, for
/// a ".json" file, a flat JSON object or a run manifest's "config" object.
RawConfig read_config_file(const std::filesystem::path& path);

/// Validates every key; unknown keys, type mismatches, range errors and a
/// missing master_seed throw ConfigError naming the key.
RunConfig parse_config(const RawConfig& raw);

/// File values with overrides applied on top (overrides win).
RunConfig parse_config(const std::filesystem::path& path, const RawConfig& overrides);

/// Runs the configured command, writing CSVs and manifest.json into the
/// output directory. Returns the written file names.
std::vector<std::string> dispatch(const RunConfig& config, std::ostream& log);

/// Exit status for an exception escaping parse_config or dispatch.
int exit_code_for(const std::exception& error) noexcept;

/// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netspill::cli
