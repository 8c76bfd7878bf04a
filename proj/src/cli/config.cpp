#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netspill/cli.hpp"
#include "netspill/errors.hpp"

namespace netspill::cli {

namespace {

struct CommandEntry {
  Command command;
  const char* name;
};

constexpr CommandEntry kCommands[] = {
    {Command::threshold_curve, "threshold-curve"}, {Command::meanfield, "meanfield"},
    {Command::simulate, "simulate"},               {Command::sweep_links, "sweep-links"},
    {Command::sweep_beta, "sweep-beta"},           {Command::boundary, "boundary"},
    {Command::calibrate, "calibrate"},             {Command::topology_compare, "topology-compare"},
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "command",       "master_seed",   "output_dir",      "threads",        "realizations",
      "layer1",        "layer2",        "network_seed",    "same_instance",  "coupling",
      "alpha",         "beta11",        "beta12",          "beta21",         "beta22",
      "mu",            "constrained",   "omegas",          "tau2_grid",      "tau1",
      "tau2",          "t_end",         "dt",              "init_fraction",  "per_node",
      "sample_every",  "seed_layer",    "seed_count",      "seeds",          "t_max",
      "record_events", "grid",          "coupling_mode",   "num_hubs",       "coupling_draw",
      "size_threshold", "p_threshold",  "link_count",      "beta12_lo",      "beta12_hi",
      "bisection_steps", "target_lo",   "target_hi",       "topologies",
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (t.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key, "expected a number, got \"" + text + "\"");
  }
  return value;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (t.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(key, "expected a non-negative integer, got \"" + text + "\"");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key, "expected true or false, got \"" + text + "\"");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> values;
  if (trim(text).empty()) return values;
  for (const auto& part : split(text, ',')) values.push_back(to_double(key, part));
  return values;
}

void require_range(const std::string& key, double value, double lo, double hi) {
  if (!(value >= lo && value <= hi)) {
    std::ostringstream msg;
    msg << "value " << value << " outside [" << lo << ", " << hi << "]";
    throw ConfigError(key, msg.str());
  }
}

void require_increasing(const std::string& key, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError(key, "list is empty");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] > values[k - 1])) throw ConfigError(key, "values must be strictly increasing");
  }
}

std::vector<double> spec_args(const std::string& key, const std::string& body, std::size_t min_count,
                              std::size_t max_count) {
  auto args = to_list(key, body);
  if (args.size() < min_count || args.size() > max_count) {
    throw ConfigError(key, "wrong number of generator arguments in \"" + body + "\"");
  }
  return args;
}

bool is_integral(double v) { return v >= 0.0 && std::floor(v) == v && v < 4.3e9; }

}  // namespace

std::string command_name(Command c) {
  for (const auto& entry : kCommands) {
    if (entry.command == c) return entry.name;
  }
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& entry : kCommands) {
    if (name == entry.name) return entry.command;
  }
  return std::nullopt;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : kCommands) out.emplace_back(entry.name);
    return out;
  }();
  return names;
}

NetworkSpec parse_network_spec(const std::string& key, const std::string& text) {
  NetworkSpec spec;
  spec.text = trim(text);
  const auto colon = spec.text.find(':');
  if (colon == std::string::npos) throw ConfigError(key, "expected <generator>:<arguments>, got \"" + text + "\"");
  spec.kind = trim(spec.text.substr(0, colon));
  const std::string body = trim(spec.text.substr(colon + 1));
  if (spec.kind == "file") {
    if (body.empty()) throw ConfigError(key, "empty file path");
    spec.path = body;
    return spec;
  }
  if (spec.kind == "ws") {
    spec.args = spec_args(key, body, 3, 3);
    if (!is_integral(spec.args[0]) || !is_integral(spec.args[1])) throw ConfigError(key, "n and k must be integers");
    require_range(key, spec.args[2], 0.0, 1.0);
  } else if (spec.kind == "er") {
    spec.args = spec_args(key, body, 2, 2);
    if (!is_integral(spec.args[0])) throw ConfigError(key, "n must be an integer");
    require_range(key, spec.args[1], 0.0, 1.0);
  } else if (spec.kind == "gnm") {
    spec.args = spec_args(key, body, 2, 2);
    if (!is_integral(spec.args[0]) || !is_integral(spec.args[1])) throw ConfigError(key, "n and m must be integers");
  } else if (spec.kind == "ba") {
    spec.args = spec_args(key, body, 2, 3);
    for (double a : spec.args) {
      if (!is_integral(a)) throw ConfigError(key, "BA arguments must be integers");
    }
  } else {
    throw ConfigError(key, "unknown generator \"" + spec.kind + "\" (expected ws, er, gnm, ba or file)");
  }
  return spec;
}

CouplingSpec parse_coupling_spec(const std::string& key, const std::string& text) {
  CouplingSpec spec;
  spec.text = trim(text);
  const auto colon = spec.text.find(':');
  if (colon == std::string::npos) throw ConfigError(key, "expected <mode>:<value>, got \"" + text + "\"");
  const std::string mode = trim(spec.text.substr(0, colon));
  const std::string body = trim(spec.text.substr(colon + 1));
  if (mode == "probability") {
    spec.kind = CouplingSpec::Kind::probability;
    spec.value = to_double(key, body);
    require_range(key, spec.value, 0.0, 1.0);
  } else if (mode == "fraction") {
    spec.kind = CouplingSpec::Kind::fraction;
    spec.value = to_double(key, body);
    require_range(key, spec.value, 0.0, 1.0);
  } else if (mode == "count") {
    spec.kind = CouplingSpec::Kind::count;
    spec.value = static_cast<double>(to_uint(key, body));
  } else if (mode == "hubs") {
    spec.kind = CouplingSpec::Kind::hubs;
    const auto parts = split(body, ',');
    if (parts.size() != 2) throw ConfigError(key, "expected hubs:<count>,<num_hubs>");
    spec.value = static_cast<double>(to_uint(key, parts[0]));
    spec.num_hubs = static_cast<NodeId>(to_uint(key, parts[1]));
    if (spec.num_hubs == 0) throw ConfigError(key, "num_hubs must be positive");
  } else if (mode == "file") {
    spec.kind = CouplingSpec::Kind::file;
    if (body.empty()) throw ConfigError(key, "empty file path");
    spec.path = body;
  } else {
    throw ConfigError(key, "unknown coupling mode \"" + mode + "\"");
  }
  return spec;
}

Graph build_network(const NetworkSpec& spec, Seed seed) {
  const auto& a = spec.args;
  const auto n = static_cast<NodeId>(a.empty() ? 0 : a[0]);
  if (spec.kind == "file") return load_graph(spec.path);
  if (spec.kind == "ws") return gen_watts_strogatz(n, static_cast<NodeId>(a[1]), a[2], seed);
  if (spec.kind == "er") return gen_erdos_renyi(n, a[1], seed);
  if (spec.kind == "gnm") return gen_erdos_renyi_gnm(n, static_cast<std::uint64_t>(a[1]), seed);
  if (spec.kind == "ba") {
    if (a.size() == 3) return gen_barabasi_albert_edges(n, static_cast<NodeId>(a[1]), static_cast<std::uint64_t>(a[2]), seed);
    return gen_barabasi_albert(n, static_cast<NodeId>(a[1]), seed);
  }
  throw ParameterError("unknown generator " + spec.kind);
}

Seed RunConfig::graph_seed() const noexcept {
  return network_seed ? *network_seed : derive_seed(master_seed, 0x6E7);
}

RawConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  RawConfig raw;
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("config")) doc = doc["config"];
    if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (value.is_string()) {
        raw[key] = value.get<std::string>();
      } else if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) {
          if (!joined.empty()) joined += ",";
          joined += item.is_string() ? item.get<std::string>() : item.dump();
        }
        raw[key] = joined;
      } else if (value.is_primitive() && !value.is_null()) {
        raw[key] = value.dump();
      } else {
        throw ConfigError(key, "unsupported JSON value");
      }
    }
    return raw;
  }
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", "line " + std::to_string(number) + ": expected key = value");
    }
    raw[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return raw;
}

RunConfig parse_config(const RawConfig& raw) {
  for (const auto& [key, value] : raw) {
    if (!known_keys().contains(key)) throw ConfigError(key, "unknown key");
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    return it->second;
  };
  auto require = [&](const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError(key, "missing mandatory key");
    return *v;
  };
  auto number = [&](const std::string& key, double& target) {
    if (auto v = get(key)) target = to_double(key, *v);
  };
  auto non_negative = [&](const std::string& key, double& target) {
    number(key, target);
    if (target < 0.0) throw ConfigError(key, "must be non-negative");
  };

  RunConfig cfg;
  cfg.raw = raw;
  const std::string command = require("command");
  const auto parsed = parse_command(command);
  if (!parsed) throw ConfigError("command", "unknown command \"" + command + "\"");
  cfg.command = *parsed;
  cfg.master_seed = to_uint("master_seed", require("master_seed"));
  if (auto v = get("output_dir")) {
    if (trim(*v).empty()) throw ConfigError("output_dir", "empty path");
    cfg.output_dir = trim(*v);
  }
  if (auto v = get("threads")) cfg.threads = static_cast<unsigned>(to_uint("threads", *v));
  if (auto v = get("realizations")) {
    cfg.realizations = to_uint("realizations", *v);
    if (cfg.realizations == 0) throw ConfigError("realizations", "must be positive");
  }

  if (auto v = get("layer1")) cfg.layer1 = parse_network_spec("layer1", *v);
  if (auto v = get("layer2")) cfg.layer2 = parse_network_spec("layer2", *v);
  if (auto v = get("network_seed")) cfg.network_seed = to_uint("network_seed", *v);
  if (auto v = get("same_instance")) cfg.same_instance = to_bool("same_instance", *v);
  if (auto v = get("coupling")) cfg.coupling = parse_coupling_spec("coupling", *v);

  non_negative("beta11", cfg.params.beta11);
  non_negative("beta12", cfg.params.beta12);
  non_negative("beta21", cfg.params.beta21);
  non_negative("beta22", cfg.params.beta22);
  number("mu", cfg.params.mu);
  if (!(cfg.params.mu > 0.0)) throw ConfigError("mu", "must be positive");
  number("alpha", cfg.params.alpha);
  if (!(cfg.params.alpha > 0.0)) throw ConfigError("alpha", "must be positive");
  if (auto v = get("constrained")) cfg.constrained = to_bool("constrained", *v);

  if (auto v = get("omegas")) {
    cfg.omegas = to_list("omegas", *v);
    if (cfg.omegas.empty()) throw ConfigError("omegas", "list is empty");
    for (double w : cfg.omegas) require_range("omegas", w, 0.0, 1.0);
  }
  if (auto v = get("tau2_grid")) {
    cfg.tau2_grid = to_list("tau2_grid", *v);
    require_increasing("tau2_grid", cfg.tau2_grid);
    for (double t : cfg.tau2_grid) {
      if (!(t >= 0.0 && t < 1.0)) throw ConfigError("tau2_grid", "values must lie in [0, 1)");
    }
  }
  if (auto v = get("tau1")) {
    cfg.tau1 = to_double("tau1", *v);
    if (*cfg.tau1 < 0.0) throw ConfigError("tau1", "must be non-negative");
  }
  if (auto v = get("tau2")) {
    cfg.tau2 = to_double("tau2", *v);
    if (!(*cfg.tau2 >= 0.0 && *cfg.tau2 < 1.0)) throw ConfigError("tau2", "must lie in [0, 1)");
  }
  if (cfg.tau1.has_value() != cfg.tau2.has_value()) {
    throw ConfigError(cfg.tau1 ? "tau2" : "tau1", "tau1 and tau2 must be given together");
  }
  number("t_end", cfg.t_end);
  if (!(cfg.t_end > 0.0)) throw ConfigError("t_end", "must be positive");
  number("dt", cfg.dt);
  if (!(cfg.dt > 0.0)) throw ConfigError("dt", "must be positive");
  number("init_fraction", cfg.init_fraction);
  require_range("init_fraction", cfg.init_fraction, 0.0, 1.0);
  if (auto v = get("per_node")) cfg.per_node = to_bool("per_node", *v);
  if (auto v = get("sample_every")) {
    cfg.sample_every = to_uint("sample_every", *v);
    if (cfg.sample_every == 0) throw ConfigError("sample_every", "must be positive");
  }

  if (auto v = get("seed_layer")) {
    const auto layer = to_uint("seed_layer", *v);
    if (layer != 1 && layer != 2) throw ConfigError("seed_layer", "must be 1 or 2");
    cfg.seed_layer = layer == 1 ? stochastic::Layer::first : stochastic::Layer::second;
  }
  if (auto v = get("seed_count")) cfg.seed_count = to_uint("seed_count", *v);
  if (auto v = get("seeds")) {
    std::vector<stochastic::NodeRef> seeds;
    const std::string t = trim(*v);
    if (t != "none" && !t.empty()) {
      for (const auto& item : split(t, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError("seeds", "expected <layer>:<node>, got \"" + item + "\"");
        const auto layer = to_uint("seeds", parts[0]);
        if (layer != 1 && layer != 2) throw ConfigError("seeds", "layer must be 1 or 2");
        seeds.push_back({layer == 1 ? stochastic::Layer::first : stochastic::Layer::second,
                         static_cast<NodeId>(to_uint("seeds", parts[1]))});
      }
    }
    cfg.seeds = std::move(seeds);
  }
  if (auto v = get("t_max")) {
    cfg.t_max = trim(*v) == "inf" ? std::numeric_limits<double>::infinity() : to_double("t_max", *v);
    if (!(cfg.t_max > 0.0)) throw ConfigError("t_max", "must be positive");
  }
  if (auto v = get("record_events")) cfg.record_events = to_bool("record_events", *v);

  if (auto v = get("grid")) {
    cfg.grid = to_list("grid", *v);
    require_increasing("grid", cfg.grid);
  }
  if (auto v = get("coupling_mode")) {
    const std::string t = trim(*v);
    if (t == "random") {
      cfg.coupling_mode = spillover::CouplingMode::random;
    } else if (t == "hubs") {
      cfg.coupling_mode = spillover::CouplingMode::hubs;
    } else {
      throw ConfigError("coupling_mode", "expected random or hubs");
    }
  }
  if (auto v = get("num_hubs")) {
    cfg.num_hubs = static_cast<NodeId>(to_uint("num_hubs", *v));
    if (cfg.num_hubs == 0) throw ConfigError("num_hubs", "must be positive");
  }
  if (auto v = get("coupling_draw")) {
    const std::string t = trim(*v);
    if (t == "redraw") {
      cfg.coupling_draw = spillover::CouplingDraw::redraw;
    } else if (t == "fixed") {
      cfg.coupling_draw = spillover::CouplingDraw::fixed;
    } else {
      throw ConfigError("coupling_draw", "expected redraw or fixed");
    }
  }
  if (auto v = get("size_threshold")) cfg.size_threshold = to_uint("size_threshold", *v);
  number("p_threshold", cfg.p_threshold);
  require_range("p_threshold", cfg.p_threshold, 0.0, 1.0);
  if (auto v = get("link_count")) cfg.link_count = to_uint("link_count", *v);
  number("beta12_lo", cfg.beta12_lo);
  number("beta12_hi", cfg.beta12_hi);
  if (!(cfg.beta12_lo > 0.0)) throw ConfigError("beta12_lo", "must be positive");
  if (!(cfg.beta12_hi > cfg.beta12_lo)) throw ConfigError("beta12_hi", "must exceed beta12_lo");
  if (auto v = get("bisection_steps")) {
    const auto steps = to_uint("bisection_steps", *v);
    if (steps == 0 || steps > 60) throw ConfigError("bisection_steps", "must lie in [1, 60]");
    cfg.bisection_steps = static_cast<int>(steps);
  }
  number("target_lo", cfg.target_lo);
  number("target_hi", cfg.target_hi);
  if (!(cfg.target_lo > 0.0)) throw ConfigError("target_lo", "must be positive");
  if (cfg.target_hi < cfg.target_lo) throw ConfigError("target_hi", "must not be below target_lo");

  if (auto v = get("topologies")) {
    for (const auto& item : split(*v, ';')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("topologies", "expected <name>=<generator spec>");
      const std::string name = trim(item.substr(0, eq));
      if (name.empty() || name.find(',') != std::string::npos) throw ConfigError("topologies", "invalid name");
      cfg.topologies.emplace_back(name, parse_network_spec("topologies", item.substr(eq + 1)));
    }
  }

  auto need = [&](const char* key, bool present) {
    if (!present) throw ConfigError(key, "missing mandatory key for command " + command);
  };
  const bool has_host = cfg.layer1.has_value() || cfg.same_instance;
  switch (cfg.command) {
    case Command::threshold_curve:
      need("layer1", has_host);
      need("layer2", cfg.layer2.has_value());
      need("omegas", !cfg.omegas.empty());
      need("tau2_grid", !cfg.tau2_grid.empty());
      break;
    case Command::meanfield:
    case Command::simulate:
      need("layer1", has_host);
      need("layer2", cfg.layer2.has_value());
      need("coupling", cfg.coupling.has_value());
      break;
    case Command::sweep_links:
    case Command::boundary:
      need("layer1", has_host);
      need("layer2", cfg.layer2.has_value());
      need("grid", !cfg.grid.empty());
      for (double f : cfg.grid) {
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("grid", "link fractions must lie in (0, 1]");
      }
      break;
    case Command::sweep_beta:
      need("layer1", has_host);
      need("layer2", cfg.layer2.has_value());
      need("grid", !cfg.grid.empty());
      need("link_count", raw.contains("link_count"));
      if (cfg.grid.front() < 0.0) throw ConfigError("grid", "beta12 values must be non-negative");
      break;
    case Command::calibrate:
      need("layer2", cfg.layer2.has_value());
      break;
    case Command::topology_compare:
      need("topologies", !cfg.topologies.empty());
      break;
  }
  if (cfg.constrained) {
    try {
      cfg.params.validate(true);
    } catch (const ParameterError& e) {
      throw ConfigError("constrained", e.what());
    }
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, const RawConfig& overrides) {
  RawConfig raw = read_config_file(path);
  for (const auto& [key, value] : overrides) raw[key] = value;
  return parse_config(raw);
}

}  // namespace netspill::cli
