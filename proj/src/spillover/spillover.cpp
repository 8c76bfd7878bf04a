#include "netspill/spillover.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "netspill/errors.hpp"
#include "netspill/format.hpp"
#include "netspill/parallel.hpp"
#include "netspill/stochastic.hpp"

namespace netspill::spillover {

using stochastic::Layer;
using stochastic::SeedStrategy;
using stochastic::Simulator;

double spillover_probability(std::span<const std::uint64_t> sizes, std::uint64_t size_threshold) {
  if (sizes.empty()) throw ParameterError("spillover probability needs at least one realization");
  const auto hits = std::count_if(sizes.begin(), sizes.end(), [&](std::uint64_t s) { return s >= size_threshold; });
  return static_cast<double>(hits) / static_cast<double>(sizes.size());
}

double binomial_stderr(double probability, std::size_t realizations) {
  return std::sqrt(probability * (1.0 - probability) / static_cast<double>(realizations));
}

std::vector<std::uint64_t> SweepPoint::clamped_sizes(std::uint64_t size_threshold) const {
  std::vector<std::uint64_t> out(raw_sizes.size());
  std::transform(raw_sizes.begin(), raw_sizes.end(), out.begin(),
                 [&](std::uint64_t s) { return clamp_size(s, size_threshold); });
  return out;
}

std::vector<double> SweepResult::grid() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.value);
  return out;
}

std::vector<double> SweepResult::probabilities() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.probability);
  return out;
}

namespace {

void validate_options(const SweepOptions& o, const Graph& reservoir) {
  if (o.realizations == 0) throw ParameterError("realizations must be at least 1");
  if (o.seeds_per_run > reservoir.size()) throw ParameterError("more seeds than reservoir nodes");
  if (!(o.p_threshold > 0.0 && o.p_threshold <= 1.0)) throw ParameterError("p_threshold must lie in (0, 1]");
  if (o.mode == CouplingMode::hubs && (o.num_hubs == 0 || o.num_hubs > reservoir.size())) {
    throw ParameterError("num_hubs must lie in [1, reservoir size]");
  }
}

std::vector<InterLink> draw_links(const SweepOptions& o, NodeId n1, NodeId n2, std::span<const NodeId> hubs,
                                  std::uint64_t links, Seed seed) {
  if (o.mode == CouplingMode::hubs) return draw_hub_links(n1, hubs, links, seed);
  return draw_random_links(n1, n2, LinkSpec::count(links), seed);
}

void require_increasing(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw ParameterError(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ParameterError(std::string(what) + " grid must be strictly increasing");
  }
}

}  // namespace

std::vector<std::uint64_t> spillover_sizes(const std::shared_ptr<const Graph>& host,
                                           const std::shared_ptr<const Graph>& reservoir,
                                           const EpidemicParams& params, std::uint64_t links,
                                           const SweepOptions& options) {
  params.validate();
  validate_options(options, *reservoir);
  const NodeId n1 = host->size();
  const NodeId n2 = reservoir->size();
  if (links > static_cast<std::uint64_t>(n1) * n2) throw ParameterError("link count exceeds n1 * n2");

  std::vector<NodeId> hubs;
  if (options.mode == CouplingMode::hubs) hubs = select_hubs(*reservoir, options.num_hubs);

  std::optional<LayeredNetwork> fixed;
  if (options.draw == CouplingDraw::fixed) {
    fixed.emplace(host, reservoir,
                  draw_links(options, n1, n2, hubs, links, derive_seed(options.master_seed, kCouplingStream)));
  }

  const SeedStrategy strategy{Layer::second, options.seeds_per_run};
  std::vector<std::uint64_t> sizes(options.realizations);
  std::vector<Simulator> workers(worker_count(options.realizations, options.threads));
  parallel_for(options.realizations, options.threads, [&](std::size_t r, unsigned worker) {
    const Seed seed = derive_seed(options.master_seed, r);
    auto run = [&](const LayeredNetwork& net) {
      const auto seeds = stochastic::draw_seed_nodes(net, strategy, seed);
      sizes[r] = workers[worker].run(net, params, seeds, seed).ever_infected_in(Layer::first);
    };
    if (fixed) {
      run(*fixed);
    } else {
      run(LayeredNetwork(host, reservoir, draw_links(options, n1, n2, hubs, links, derive_seed(seed, kCouplingStream))));
    }
  });
  return sizes;
}

SweepPoint estimate_point(const std::shared_ptr<const Graph>& host, const std::shared_ptr<const Graph>& reservoir,
                          const EpidemicParams& params, std::uint64_t links, double value,
                          const SweepOptions& options) {
  SweepPoint point;
  point.value = value;
  point.links = links;
  point.raw_sizes = spillover_sizes(host, reservoir, params, links, options);
  point.probability = spillover_probability(point.raw_sizes, options.size_threshold);
  point.standard_error = binomial_stderr(point.probability, point.raw_sizes.size());
  return point;
}

SweepResult sweep_links(const std::shared_ptr<const Graph>& host, const std::shared_ptr<const Graph>& reservoir,
                        const EpidemicParams& params, std::span<const double> fractions,
                        const SweepOptions& options) {
  require_increasing(fractions, "link fraction");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ParameterError("link fractions must lie in (0, 1]");
  }
  SweepResult result;
  result.parameter = "link_fraction";
  result.size_threshold = options.size_threshold;
  result.p_threshold = options.p_threshold;
  for (double f : fractions) {
    const auto links = LinkSpec::fraction(f).resolve_count(host->size(), reservoir->size());
    result.points.push_back(estimate_point(host, reservoir, params, links, f, options));
  }
  const auto grid = result.grid();
  const auto probs = result.probabilities();
  result.critical = detect_transition(grid, probs, options.p_threshold);
  return result;
}

SweepResult sweep_beta12(const std::shared_ptr<const Graph>& host, const std::shared_ptr<const Graph>& reservoir,
                         const EpidemicParams& params_base, std::span<const double> beta12_grid,
                         std::uint64_t link_count, const SweepOptions& options) {
  require_increasing(beta12_grid, "beta12");
  if (!(beta12_grid.front() >= 0.0)) throw ParameterError("beta12 values must be non-negative");
  if (link_count > static_cast<std::uint64_t>(host->size()) * reservoir->size()) {
    throw ParameterError("link count exceeds n1 * n2");
  }
  SweepResult result;
  result.parameter = "beta12";
  result.size_threshold = options.size_threshold;
  result.p_threshold = options.p_threshold;
  for (double beta : beta12_grid) {
    EpidemicParams params = params_base;
    params.beta12 = beta;
    result.points.push_back(estimate_point(host, reservoir, params, link_count, beta, options));
  }
  const auto grid = result.grid();
  const auto probs = result.probabilities();
  result.critical = detect_transition(grid, probs, options.p_threshold);
  return result;
}

std::optional<double> detect_transition(std::span<const double> grid, std::span<const double> probabilities,
                                        double p_threshold) {
  if (grid.size() != probabilities.size()) throw ParameterError("grid and probabilities differ in length");
  if (grid.empty()) return std::nullopt;
  if (probabilities[0] >= p_threshold) return grid[0];
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (probabilities[j - 1] < p_threshold && p_threshold <= probabilities[j]) {
      const double w = (p_threshold - probabilities[j - 1]) / (probabilities[j] - probabilities[j - 1]);
      return grid[j - 1] + w * (grid[j] - grid[j - 1]);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

BoundaryResult regime_boundary(const std::shared_ptr<const Graph>& host, const std::shared_ptr<const Graph>& reservoir,
                               const EpidemicParams& params_base, std::span<const double> fractions,
                               const BoundaryOptions& options) {
  if (fractions.empty()) throw ParameterError("boundary needs at least one link fraction");
  if (!(options.beta12_lo >= 0.0 && options.beta12_hi > options.beta12_lo)) {
    throw ParameterError("beta12 bracket must satisfy 0 <= lo < hi");
  }
  if (options.iterations < 0) throw ParameterError("bisection iterations must be non-negative");
  for (double f : fractions) {
    if (!(f >= 0.001 && f <= 1.0)) {
      throw ParameterError("boundary link fractions must lie in [0.001, 1]; below that no hyperbolic regime exists");
    }
  }

  BoundaryResult result;
  for (double f : fractions) {
    const auto links = LinkSpec::fraction(f).resolve_count(host->size(), reservoir->size());
    auto probability = [&](double beta) {
      EpidemicParams p = params_base;
      p.beta12 = beta;
      return spillover_probability(spillover_sizes(host, reservoir, p, links, options.sweep),
                                   options.sweep.size_threshold);
    };
    BoundaryPoint point{f, std::nullopt, {}};
    double lo = options.beta12_lo;
    double hi = options.beta12_hi;
    const double thr = options.sweep.p_threshold;
    if (probability(lo) >= thr) {
      point.error = "spillover probability already reaches the threshold at beta12=" + format_double(lo);
    } else if (probability(hi) < thr) {
      point.error = "spillover probability stays below the threshold up to beta12=" + format_double(hi);
    } else {
      for (int it = 0; it < options.iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        (probability(mid) >= thr ? hi : lo) = mid;
      }
      point.beta12_critical = 0.5 * (lo + hi);
    }
    result.points.push_back(std::move(point));
  }

  std::vector<double> products;
  for (const auto& p : result.points) {
    if (p.beta12_critical) products.push_back(p.fraction * *p.beta12_critical);
  }
  if (products.empty()) {
    result.constant = std::nan("");
    result.max_relative_deviation = std::nan("");
    return result;
  }
  std::vector<double> sorted = products;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  result.constant = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  for (double p : products) {
    result.max_relative_deviation = std::max(result.max_relative_deviation, std::abs(p - result.constant) / result.constant);
  }
  return result;
}

// ---------------------------------------------------------------------------

double mean_outbreak_size(const std::shared_ptr<const Graph>& reservoir, double beta22,
                          const CalibrationOptions& options) {
  const LayeredNetwork isolated(std::make_shared<const Graph>(), reservoir, {});
  EpidemicParams params;
  params.beta22 = beta22;
  params.mu = options.mu;
  stochastic::EnsembleOptions ensemble;
  ensemble.threads = options.threads;
  const auto outcomes = stochastic::run_ensemble(isolated, params, {Layer::second, options.seeds_per_run},
                                                 options.realizations, options.master_seed, ensemble);
  double total = 0.0;
  for (const auto& o : outcomes) total += static_cast<double>(o.ever_infected_in(Layer::second));
  return total / static_cast<double>(outcomes.size());
}

namespace {

std::optional<CalibrationResult> calibration_attempt(const std::shared_ptr<const Graph>& reservoir,
                                                     const CalibrationOptions& options,
                                                     std::vector<CalibrationStep>& trace) {
  const auto inside = [&](double m) { return m >= options.target_lo && m <= options.target_hi; };
  auto evaluate = [&](double beta) {
    const double m = mean_outbreak_size(reservoir, beta, options);
    trace.push_back({beta, options.realizations, m});
    return m;
  };
  auto done = [&](double beta, double m) {
    return CalibrationResult{beta, m, options.realizations, trace};
  };

  // Without transmission the outbreak is exactly the seed set.
  const auto seeds = static_cast<double>(options.seeds_per_run);
  trace.push_back({0.0, options.realizations, seeds});
  if (inside(seeds)) return done(0.0, seeds);

  double lo = 0.0;
  double hi = 0.05;
  double m_hi = evaluate(hi);
  while (m_hi < options.target_lo) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) return std::nullopt;
    m_hi = evaluate(hi);
  }
  if (inside(m_hi)) return done(hi, m_hi);

  for (int it = 0; it < options.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double m = evaluate(mid);
    if (inside(m)) return done(mid, m);
    (m < options.target_lo ? lo : hi) = mid;
    if (hi - lo <= 1e-12 * hi) break;
  }
  return std::nullopt;
}

}  // namespace

CalibrationResult calibrate_reservoir_rate(const std::shared_ptr<const Graph>& reservoir,
                                           const CalibrationOptions& options) {
  if (!(options.target_lo > 0.0 && options.target_hi >= options.target_lo)) {
    throw ParameterError("calibration target must be a positive interval");
  }
  if (options.seeds_per_run > reservoir->size()) throw ParameterError("more seeds than reservoir nodes");
  if (options.realizations == 0) throw ParameterError("realizations must be at least 1");
  if (static_cast<double>(options.seeds_per_run) > options.target_hi) {
    throw ParameterError("target mean lies below the seed count");
  }
  if (options.target_lo > static_cast<double>(reservoir->size())) {
    throw ParameterError("target mean exceeds the reservoir size");
  }

  std::vector<CalibrationStep> trace;
  if (auto r = calibration_attempt(reservoir, options, trace)) return *r;
  CalibrationOptions retry = options;
  retry.realizations *= 4;
  if (auto r = calibration_attempt(reservoir, retry, trace)) return *r;

  std::string message = "reservoir calibration failed to reach [" + format_double(options.target_lo) + ", " +
                        format_double(options.target_hi) + "]; trace (beta22, R, mean):";
  for (const auto& s : trace) {
    message += " (" + format_double(s.beta22) + ", " + std::to_string(s.realizations) + ", " + format_double(s.mean) + ")";
  }
  throw CalibrationError(message);
}

std::optional<std::uint64_t> minimal_links(const std::shared_ptr<const Graph>& host,
                                           const std::shared_ptr<const Graph>& reservoir,
                                           const EpidemicParams& params, const SweepOptions& options) {
  params.validate();
  validate_options(options, *reservoir);
  if (params.beta12 == 0.0) return std::nullopt;  // no path from reservoir to host
  const std::uint64_t capacity = static_cast<std::uint64_t>(host->size()) * reservoir->size();
  if (capacity == 0) return std::nullopt;

  std::map<std::uint64_t, bool> memo;
  auto reaches = [&](std::uint64_t links) {
    if (auto it = memo.find(links); it != memo.end()) return it->second;
    const double p = spillover_probability(spillover_sizes(host, reservoir, params, links, options),
                                           options.size_threshold);
    return memo[links] = p >= options.p_threshold;
  };

  if (reaches(1)) return 1;
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (true) {
    hi = std::min(hi, capacity);
    if (reaches(hi)) break;
    if (hi == capacity) return std::nullopt;
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (reaches(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<TopologyResult> topology_threshold_links(std::span<const Topology> topologies,
                                                     const TopologyOptions& options) {
  std::vector<TopologyResult> results;
  for (const auto& topo : topologies) {
    TopologyResult r;
    r.name = topo.name;
    CalibrationOptions cal = options.calibration;
    cal.mu = options.mu;
    r.calibration = calibrate_reservoir_rate(topo.reservoir, cal);
    EpidemicParams params;
    params.beta12 = options.beta12;
    params.beta22 = r.calibration.beta22;
    params.mu = options.mu;
    r.min_links = minimal_links(topo.host, topo.reservoir, params, options.sweep);
    results.push_back(std::move(r));
  }
  return results;
}

// ---------------------------------------------------------------------------

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "param_value,realization,raw_size,clamped_size\n";
  for (const auto& p : result.points) {
    const std::string value = format_double(p.value);
    for (std::size_t r = 0; r < p.raw_sizes.size(); ++r) {
      out << value << ',' << r << ',' << p.raw_sizes[r] << ',' << clamp_size(p.raw_sizes[r], result.size_threshold)
          << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const SweepResult& result) {
  out << "param_value,R,probability,stderr\n";
  for (const auto& p : result.points) {
    out << format_double(p.value) << ',' << p.raw_sizes.size() << ',' << format_double(p.probability) << ','
        << format_double(p.standard_error) << '\n';
  }
}

void write_transition_csv(std::ostream& out, const SweepResult& result) {
  out << "parameter,p_threshold,critical_value\n";
  out << result.parameter << ',' << format_double(result.p_threshold) << ','
      << (result.critical ? format_double(*result.critical) : std::string()) << '\n';
}

void write_boundary_csv(std::ostream& out, const BoundaryResult& result) {
  out << "fraction,beta12_critical,product\n";
  for (const auto& p : result.points) {
    out << format_double(p.fraction) << ',';
    if (p.beta12_critical) {
      out << format_double(*p.beta12_critical) << ',' << format_double(p.fraction * *p.beta12_critical);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

void write_calibration_csv(std::ostream& out, const CalibrationResult& result) {
  out << "step,beta22,R,mean_ever_infected\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& s = result.trace[i];
    out << i << ',' << format_double(s.beta22) << ',' << s.realizations << ',' << format_double(s.mean) << '\n';
  }
}

void write_topology_csv(std::ostream& out, std::span<const TopologyResult> results) {
  out << "topology,beta22,mean_ever_infected,min_links\n";
  for (const auto& r : results) {
    out << r.name << ',' << format_double(r.calibration.beta22) << ',' << format_double(r.calibration.mean) << ','
        << (r.min_links ? std::to_string(*r.min_links) : std::string()) << '\n';
  }
}

}  // namespace netspill::spillover
