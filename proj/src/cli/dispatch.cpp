#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "netspill/cli.hpp"
#include "netspill/errors.hpp"
#include "netspill/meanfield.hpp"
#include "netspill/spectral.hpp"

#ifndef NETSPILL_VERSION
#define NETSPILL_VERSION "0.0.0"
#endif

namespace netspill::cli {

namespace {

using json = nlohmann::ordered_json;

struct Layers {
  std::shared_ptr<const Graph> host;
  std::shared_ptr<const Graph> reservoir;
};

class Output {
 public:
  Output(const std::filesystem::path& dir, std::ostream& log) : dir_(dir), log_(log) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw IoError("cannot write " + path.string());
    files_.push_back(name);
    log_ << "wrote " << path.string() << '\n';
  }

  template <typename Writer>
  void write_csv(const std::string& name, Writer&& writer) {
    std::ostringstream buffer;
    writer(buffer);
    write(name, buffer.str());
  }

  const std::vector<std::string>& files() const noexcept { return files_; }

 private:
  std::filesystem::path dir_;
  std::ostream& log_;
  std::vector<std::string> files_;
};

Layers build_layers(const RunConfig& cfg) {
  const Seed gs = cfg.graph_seed();
  Layers layers;
  layers.reservoir = std::make_shared<const Graph>(build_network(*cfg.layer2, derive_seed(gs, 2)));
  layers.host = cfg.same_instance ? layers.reservoir
                                  : std::make_shared<const Graph>(build_network(*cfg.layer1, derive_seed(gs, 1)));
  return layers;
}

LayeredNetwork build_coupled(const RunConfig& cfg, const Layers& layers) {
  const auto& c = *cfg.coupling;
  const Seed seed = derive_seed(cfg.graph_seed(), 3);
  switch (c.kind) {
    case CouplingSpec::Kind::probability:
      return couple_random(layers.host, layers.reservoir, LinkSpec::probability(c.value), seed);
    case CouplingSpec::Kind::count:
      return couple_random(layers.host, layers.reservoir, LinkSpec::count(static_cast<std::uint64_t>(c.value)), seed);
    case CouplingSpec::Kind::fraction:
      return couple_random(layers.host, layers.reservoir, LinkSpec::fraction(c.value), seed);
    case CouplingSpec::Kind::hubs:
      return couple_to_hubs(layers.host, layers.reservoir, static_cast<std::uint64_t>(c.value), c.num_hubs, seed);
    case CouplingSpec::Kind::file:
      return LayeredNetwork(layers.host, layers.reservoir,
                            load_interlinks(c.path, layers.host->size(), layers.reservoir->size()));
  }
  throw ParameterError("unknown coupling kind");
}

spillover::SweepOptions sweep_options(const RunConfig& cfg) {
  spillover::SweepOptions o;
  o.realizations = cfg.realizations;
  o.seeds_per_run = cfg.seed_count;
  o.master_seed = cfg.master_seed;
  o.mode = cfg.coupling_mode;
  o.num_hubs = cfg.num_hubs;
  o.draw = cfg.coupling_draw;
  o.size_threshold = cfg.size_threshold;
  o.p_threshold = cfg.p_threshold;
  o.threads = cfg.threads;
  return o;
}

spillover::CalibrationOptions calibration_options(const RunConfig& cfg) {
  spillover::CalibrationOptions o;
  o.target_lo = cfg.target_lo;
  o.target_hi = cfg.target_hi;
  o.seeds_per_run = cfg.seed_count;
  o.mu = cfg.params.mu;
  o.realizations = cfg.realizations;
  o.master_seed = cfg.master_seed;
  o.threads = cfg.threads;
  return o;
}

json optional_value(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void run_threshold_curve(const RunConfig& cfg, Output& out, json& results) {
  const Layers layers = build_layers(cfg);
  std::vector<spectral::ThresholdCurve> curves;
  for (std::size_t k = 0; k < cfg.omegas.size(); ++k) {
    const double omega = cfg.omegas[k];
    const LayeredNetwork net = couple_random(layers.host, layers.reservoir, LinkSpec::probability(omega),
                                             derive_seed(cfg.graph_seed(), 100 + k));
    spectral::CurveOptions options;
    options.threads = cfg.threads;
    options.omega = omega;
    curves.push_back(spectral::threshold_curve(net, cfg.params.alpha, cfg.tau2_grid, options));
    results["curves"].push_back({{"omega", omega},
                                 {"links", net.interlinks().size()},
                                 {"lambda1", curves.back().lambda1},
                                 {"lambda2", curves.back().lambda2},
                                 {"tau_c1_last", curves.back().points.back().tau_c1}});
  }
  out.write_csv("threshold_curve.csv", [&](std::ostream& os) { spectral::write_threshold_csv(os, curves); });
}

void run_meanfield(const RunConfig& cfg, Output& out, json& results) {
  const Layers layers = build_layers(cfg);
  const LayeredNetwork net = build_coupled(cfg, layers);
  EpidemicParams params = cfg.params;
  if (cfg.tau1) {
    const double lambda1 = spectral::adjacency_spectral_radius(net.layer1());
    const double lambda2 = spectral::adjacency_spectral_radius(net.layer2());
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw ParameterError("normalised rates need layers with edges");
    params = EpidemicParams::coupled(*cfg.tau1 * cfg.params.mu / lambda1, *cfg.tau2 * cfg.params.mu / lambda2,
                                     cfg.params.alpha, cfg.params.mu);
    results["lambda1"] = lambda1;
    results["lambda2"] = lambda2;
  }
  params.validate(cfg.constrained || cfg.tau1.has_value());
  results["beta11"] = params.beta11;
  results["beta12"] = params.beta12;
  results["beta21"] = params.beta21;
  results["beta22"] = params.beta22;

  const auto init = meanfield::seeded_initial_state(net, cfg.init_fraction, derive_seed(cfg.master_seed, 7));
  meanfield::IntegrateOptions options;
  options.t_end = cfg.t_end;
  options.dt = cfg.dt;
  options.sample_every = cfg.sample_every;
  options.keep_node_states = cfg.per_node;
  const auto trajectory = meanfield::integrate(net, params, init, options);

  results["jacobian_leading_eigenvalue"] = spectral::jacobian_leading_eigenvalue(net, params);
  std::vector<meanfield::NodeState> small = init;
  double mass = 0.0;
  for (auto& node : small) {
    node.i *= 0.01;
    node.s = 1.0 - node.i;
    node.r = 0.0;
    mass += node.i;
  }
  if (mass > 0.0) {
    const auto growth = meanfield::linearized_growth_check(net, params, small, 0.0);
    results["initial_growth_rate"] = growth.initial_rate;
    results["growth_sign"] = growth.sign;
  }
  const auto& last = trajectory.layers.back();
  results["layer1_recovered_final"] = last[0].r;
  results["layer2_recovered_final"] = last[1].r;

  out.write_csv("trajectory.csv", [&](std::ostream& os) { meanfield::write_trajectory_csv(os, trajectory); });
  if (cfg.per_node) out.write_csv("nodes.csv", [&](std::ostream& os) { meanfield::write_node_csv(os, trajectory); });
}

void run_simulate(const RunConfig& cfg, Output& out, json& results) {
  const Layers layers = build_layers(cfg);
  const LayeredNetwork net = build_coupled(cfg, layers);
  const Seed seed = derive_seed(cfg.master_seed, 0);
  const auto seeds = cfg.seeds ? *cfg.seeds
                               : stochastic::draw_seed_nodes(net, {cfg.seed_layer, cfg.seed_count}, seed);
  stochastic::SimulationOptions options;
  options.t_max = cfg.t_max;
  options.record_events = cfg.record_events;
  const auto outcome = stochastic::simulate(net, cfg.params, seeds, seed, options);
  results["ever_infected_layer1"] = outcome.ever_infected[0];
  results["ever_infected_layer2"] = outcome.ever_infected[1];
  results["extinction_time"] = outcome.extinction_time;
  results["truncated"] = outcome.truncated;
  results["links"] = net.interlinks().size();
  out.write_csv("outcome.csv", [&](std::ostream& os) { stochastic::write_ensemble_csv(os, std::span(&outcome, 1)); });
  if (cfg.record_events) out.write_csv("events.csv", [&](std::ostream& os) { stochastic::write_events_csv(os, outcome); });
}

void write_sweep_outputs(const spillover::SweepResult& result, Output& out, json& results) {
  results["parameter"] = result.parameter;
  results["critical_value"] = optional_value(result.critical);
  out.write_csv("sweep.csv", [&](std::ostream& os) { spillover::write_sweep_csv(os, result); });
  out.write_csv("summary.csv", [&](std::ostream& os) { spillover::write_summary_csv(os, result); });
  out.write_csv("transition.csv", [&](std::ostream& os) { spillover::write_transition_csv(os, result); });
}

void run_sweep_links(const RunConfig& cfg, Output& out, json& results) {
  const Layers layers = build_layers(cfg);
  const auto result = spillover::sweep_links(layers.host, layers.reservoir, cfg.params, cfg.grid, sweep_options(cfg));
  write_sweep_outputs(result, out, results);
}

void run_sweep_beta(const RunConfig& cfg, Output& out, json& results) {
  const Layers layers = build_layers(cfg);
  const auto result = spillover::sweep_beta12(layers.host, layers.reservoir, cfg.params, cfg.grid, cfg.link_count,
                                              sweep_options(cfg));
  write_sweep_outputs(result, out, results);
}

void run_boundary(const RunConfig& cfg, Output& out, json& results) {
  const Layers layers = build_layers(cfg);
  spillover::BoundaryOptions options;
  options.sweep = sweep_options(cfg);
  options.beta12_lo = cfg.beta12_lo;
  options.beta12_hi = cfg.beta12_hi;
  options.iterations = cfg.bisection_steps;
  const auto result = spillover::regime_boundary(layers.host, layers.reservoir, cfg.params, cfg.grid, options);
  results["constant"] = result.constant;
  results["max_relative_deviation"] = result.max_relative_deviation;
  for (const auto& p : result.points) {
    if (!p.error.empty()) results["errors"].push_back({{"fraction", p.fraction}, {"message", p.error}});
  }
  out.write_csv("boundary.csv", [&](std::ostream& os) { spillover::write_boundary_csv(os, result); });
}

void run_calibrate(const RunConfig& cfg, Output& out, json& results) {
  const auto reservoir = std::make_shared<const Graph>(build_network(*cfg.layer2, derive_seed(cfg.graph_seed(), 2)));
  const auto result = spillover::calibrate_reservoir_rate(reservoir, calibration_options(cfg));
  results["beta22"] = result.beta22;
  results["mean_ever_infected"] = result.mean;
  results["realizations"] = result.realizations;
  out.write_csv("calibration.csv", [&](std::ostream& os) { spillover::write_calibration_csv(os, result); });
}

void run_topology_compare(const RunConfig& cfg, Output& out, json& results) {
  const Seed gs = cfg.graph_seed();
  std::vector<spillover::Topology> topologies;
  for (std::size_t k = 0; k < cfg.topologies.size(); ++k) {
    const auto& [name, spec] = cfg.topologies[k];
    auto reservoir = std::make_shared<const Graph>(build_network(spec, derive_seed(gs, 11 + 2 * k)));
    auto host = cfg.same_instance ? reservoir
                                  : std::make_shared<const Graph>(build_network(spec, derive_seed(gs, 10 + 2 * k)));
    topologies.push_back({name, std::move(host), std::move(reservoir)});
  }
  spillover::TopologyOptions options;
  options.sweep = sweep_options(cfg);
  options.calibration = calibration_options(cfg);
  options.mu = cfg.params.mu;
  if (cfg.raw.contains("beta12")) options.beta12 = cfg.params.beta12;
  const auto compared = spillover::topology_threshold_links(topologies, options);
  for (const auto& t : compared) {
    results["topologies"].push_back({{"name", t.name},
                                     {"beta22", t.calibration.beta22},
                                     {"min_links", t.min_links ? json(*t.min_links) : json(nullptr)}});
  }
  out.write_csv("topology.csv", [&](std::ostream& os) { spillover::write_topology_csv(os, compared); });
}

}  // namespace

std::vector<std::string> dispatch(const RunConfig& cfg, std::ostream& log) {
  Output out(cfg.output_dir, log);
  json results = json::object();
  switch (cfg.command) {
    case Command::threshold_curve: run_threshold_curve(cfg, out, results); break;
    case Command::meanfield: run_meanfield(cfg, out, results); break;
    case Command::simulate: run_simulate(cfg, out, results); break;
    case Command::sweep_links: run_sweep_links(cfg, out, results); break;
    case Command::sweep_beta: run_sweep_beta(cfg, out, results); break;
    case Command::boundary: run_boundary(cfg, out, results); break;
    case Command::calibrate: run_calibrate(cfg, out, results); break;
    case Command::topology_compare: run_topology_compare(cfg, out, results); break;
  }

  json manifest;
  manifest["tool"] = "netspill";
  manifest["version"] = NETSPILL_VERSION;
  manifest["command"] = command_name(cfg.command);
  manifest["master_seed"] = cfg.master_seed;
  manifest["config"] = json::object();
  for (const auto& [key, value] : cfg.raw) manifest["config"][key] = value;
  manifest["outputs"] = out.files();
  manifest["results"] = results;
  out.write("manifest.json", manifest.dump(2) + "\n");
  return out.files();
}

int exit_code_for(const std::exception& error) noexcept {
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const ParameterError*>(&error)) return kConfigError;
  if (dynamic_cast<const NumericError*>(&error)) return kNumericError;
  if (dynamic_cast<const IoError*>(&error)) return kIoError;
  return kFailure;
}

}  // namespace netspill::cli
