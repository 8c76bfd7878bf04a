#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netspill/graph.hpp"
#include "netspill/params.hpp"
#include "netspill/rng.hpp"

// Spillover experiments. Layer 1 is the novel host, layer 2 the reservoir;
// beta12 carries infection from reservoir to host. The spillover size of a
// realization is the number of host nodes ever infected.
namespace netspill::spillover {

/// Fraction of sizes >= size_threshold. Throws ParameterError on empty input.
double spillover_probability(std::span<const std::uint64_t> sizes, std::uint64_t size_threshold = 3);

/// Sizes below the threshold count as no spillover.
constexpr std::uint64_t clamp_size(std::uint64_t raw, std::uint64_t size_threshold = 3) noexcept {
  return raw < size_threshold ? 0 : raw;
}

/// sqrt(p (1 - p) / R)
double binomial_stderr(double probability, std::size_t realizations);

enum class CouplingMode { random, hubs };
enum class CouplingDraw { redraw, fixed };

struct SweepOptions {
  std::size_t realizations = 2000;
  std::uint64_t seeds_per_run = 10;
  Seed master_seed = 0;
  CouplingMode mode = CouplingMode::random;
  NodeId num_hubs = 5;
  CouplingDraw draw = CouplingDraw::redraw;
  std::uint64_t size_threshold = 3;
  double p_threshold = 0.1;
  unsigned threads = 0;
};

struct SweepPoint {
  double value = 0.0;
  std::uint64_t links = 0;
  std::vector<std::uint64_t> raw_sizes;
  double probability = 0.0;
  double standard_error = 0.0;

  std::vector<std::uint64_t> clamped_sizes(std::uint64_t size_threshold = 3) const;
};

struct SweepResult {
  std::string parameter;  // "link_fraction" | "beta12" | "link_count"
  std::vector<SweepPoint> points;
  std::optional<double> critical;
  std::uint64_t size_threshold = 3;
  double p_threshold = 0.1;

  std::vector<double> grid() const;
  std::vector<double> probabilities() const;
};

/// Spillover sizes of R realizations at a fixed inter-link count.
///
/// Realization r uses s_r = derive_seed(master_seed, r): the coupling is
/// drawn from derive_seed(s_r, kCouplingStream) (redraw) or once from
/// derive_seed(master_seed, kCouplingStream) (fixed), reservoir seeds from
/// draw_seed_nodes(.., s_r) and the simulation from s_r. Every grid point
/// of a sweep reuses the same s_r.
std::vector<std::uint64_t> spillover_sizes(const std::shared_ptr<const Graph>& host,
                                           const std::shared_ptr<const Graph>& reservoir,
                                           const EpidemicParams& params, std::uint64_t links,
                                           const SweepOptions& options);

/// Probability estimate at one link count.
SweepPoint estimate_point(const std::shared_ptr<const Graph>& host, const std::shared_ptr<const Graph>& reservoir,
                          const EpidemicParams& params, std::uint64_t links, double value,
                          const SweepOptions& options);

/// Link fractions in (0, 1]; count per point is round(f * n1 * n2).
SweepResult sweep_links(const std::shared_ptr<const Graph>& host, const std::shared_ptr<const Graph>& reservoir,
                        const EpidemicParams& params, std::span<const double> fractions,
                        const SweepOptions& options);

/// beta12 grid, non-negative and strictly increasing, at a fixed link count.
SweepResult sweep_beta12(const std::shared_ptr<const Graph>& host, const std::shared_ptr<const Graph>& reservoir,
                         const EpidemicParams& params_base, std::span<const double> beta12_grid,
                         std::uint64_t link_count, const SweepOptions& options);

/// First upward crossing of p_threshold, linearly interpolated between grid
/// points; grid[0] when the first estimate is already above; none otherwise.
std::optional<double> detect_transition(std::span<const double> grid, std::span<const double> probabilities,
                                        double p_threshold = 0.1);

struct BoundaryOptions {
  SweepOptions sweep;
  double beta12_lo = 0.001;
  double beta12_hi = 1.0;
  int iterations = 12;
};

struct BoundaryPoint {
  double fraction = 0.0;
  std::optional<double> beta12_critical;
  std::string error;  // why no crossing was found
};

struct BoundaryResult {
  std::vector<BoundaryPoint> points;
  double constant = 0.0;                // median of fraction * beta12_critical
  double max_relative_deviation = 0.0;  // max |product - c| / c
};

/// Critical beta12 per link fraction by bisection on the spillover
/// probability; the points are fitted by fraction * beta12 = c.
BoundaryResult regime_boundary(const std::shared_ptr<const Graph>& host, const std::shared_ptr<const Graph>& reservoir,
                               const EpidemicParams& params_base, std::span<const double> fractions,
                               const BoundaryOptions& options);

struct CalibrationOptions {
  double target_lo = 51.0;
  double target_hi = 53.0;
  std::uint64_t seeds_per_run = 10;
  double mu = 1.0;
  std::size_t realizations = 2000;
  Seed master_seed = 0;
  unsigned threads = 0;
  int max_iterations = 60;
};

struct CalibrationStep {
  double beta22 = 0.0;
  std::size_t realizations = 0;
  double mean = 0.0;
};

struct CalibrationResult {
  double beta22 = 0.0;
  double mean = 0.0;
  std::size_t realizations = 0;
  std::vector<CalibrationStep> trace;
};

/// Mean number of reservoir nodes ever infected from seeds_per_run random
/// seeds with the reservoir in isolation.
double mean_outbreak_size(const std::shared_ptr<const Graph>& reservoir, double beta22,
                          const CalibrationOptions& options);

/// beta22 placing the mean reservoir outbreak inside [target_lo, target_hi].
/// Doubling search for an upper bracket, then bisection. If that fails the
/// search is repeated once with 4x the realizations; a second failure throws
/// CalibrationError carrying the trace.
CalibrationResult calibrate_reservoir_rate(const std::shared_ptr<const Graph>& reservoir,
                                           const CalibrationOptions& options);

/// Smallest link count whose spillover probability reaches p_threshold:
/// doubling from one link, then integer bisection. None when beta12 is zero
/// or even full coupling stays below the threshold.
std::optional<std::uint64_t> minimal_links(const std::shared_ptr<const Graph>& host,
                                           const std::shared_ptr<const Graph>& reservoir,
                                           const EpidemicParams& params, const SweepOptions& options);

struct Topology {
  std::string name;
  std::shared_ptr<const Graph> host;
  std::shared_ptr<const Graph> reservoir;
};

struct TopologyOptions {
  SweepOptions sweep;
  CalibrationOptions calibration;
  double beta12 = 0.02;
  double mu = 1.0;
};

struct TopologyResult {
  std::string name;
  CalibrationResult calibration;
  std::optional<std::uint64_t> min_links;
};

/// Calibrates each reservoir, then finds its minimal spillover link count.
std::vector<TopologyResult> topology_threshold_links(std::span<const Topology> topologies,
                                                     const TopologyOptions& options);

/// "param_value,realization,raw_size,clamped_size"
void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// "param_value,R,probability,stderr"
void write_summary_csv(std::ostream& out, const SweepResult& result);
/// "parameter,p_threshold,critical_value" (critical_value empty when absent)
void write_transition_csv(std::ostream& out, const SweepResult& result);
/// "fraction,beta12_critical,product" (empty fields when no crossing)
void write_boundary_csv(std::ostream& out, const BoundaryResult& result);
/// "step,beta22,R,mean_ever_infected"
void write_calibration_csv(std::ostream& out, const CalibrationResult& result);
/// "topology,beta22,mean_ever_infected,min_links"
void write_topology_csv(std::ostream& out, std::span<const TopologyResult> results);

}  // namespace netspill::spillover
