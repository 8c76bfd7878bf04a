#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "netspill/graph.hpp"
#include "netspill/params.hpp"
#include "netspill/rng.hpp"

namespace netspill::stochastic {

enum class Layer : std::uint8_t { first = 0, second = 1 };

struct NodeRef {
  Layer layer = Layer::first;
  NodeId node = 0;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

enum class Transition : std::uint8_t { infection, recovery };

struct Event {
  double t = 0.0;
  NodeRef node;
  Transition transition = Transition::infection;
};

struct RealizationOutcome {
  /// Nodes that were ever infected, seeds included, per layer.
  std::array<std::uint64_t, 2> ever_infected{};
  /// Time of the last event; t_max when truncated.
  double extinction_time = 0.0;
  std::uint64_t events = 0;
  Seed rng_seed = 0;
  bool truncated = false;
  /// Stochastic events only; seeds are the initial condition and are not logged.
  std::vector<Event> log;

  std::uint64_t ever_infected_in(Layer layer) const noexcept {
    return ever_infected[static_cast<std::size_t>(layer)];
  }
};

struct SimulationOptions {
  double t_max = std::numeric_limits<double>::infinity();
  bool record_events = false;
};

/// Exact continuous-time SIR on a layered network (direct method).
///
/// A susceptible node of layer m is infected at rate
/// beta_m1 * (infected layer-1 neighbours) + beta_m2 * (infected layer-2
/// neighbours); an infected node recovers at rate mu. Node rates live in a
/// binary sum tree, so event selection and each rate update cost
/// O(log n). Infected-neighbour counts are updated per event in
/// O(degree). The tree is rebuilt from its leaves every 10^4 events.
///
/// A Simulator keeps its buffers between runs and resets only the nodes a
/// run touched, so reuse one per thread for ensembles.
class Simulator {
 public:
  static constexpr std::uint64_t kRebuildInterval = 10000;

  RealizationOutcome run(const LayeredNetwork& net, const EpidemicParams& params, std::span<const NodeRef> seeds,
                         Seed rng_seed, const SimulationOptions& options = {});

 private:
  enum class State : std::uint8_t { susceptible, infected, recovered };

  class RateTree {
   public:
    void resize(std::size_t n);
    void set(std::size_t i, double rate);
    double leaf(std::size_t i) const noexcept { return tree_[leaves_ + i]; }
    double total() const noexcept { return tree_[1]; }
    std::size_t sample(double u) const noexcept;
    void rebuild();

   private:
    std::size_t leaves_ = 1;
    std::vector<double> tree_ = std::vector<double>(2, 0.0);
  };

  void prepare(std::size_t n);
  void touch(std::size_t v);
  template <class Visit>
  void for_each_neighbor(std::size_t v, Visit&& visit) const;
  void infect(std::size_t v);
  void recover(std::size_t v);
  double infection_rate(std::size_t v) const noexcept;

  const LayeredNetwork* net_ = nullptr;
  EpidemicParams params_;
  NodeId n1_ = 0;
  std::vector<State> state_;
  std::vector<std::uint32_t> from_layer1_;  // infected layer-1 neighbours
  std::vector<std::uint32_t> from_layer2_;  // infected layer-2 neighbours
  std::vector<std::uint8_t> touched_flag_;
  std::vector<std::size_t> touched_;
  RateTree rates_;
  std::array<std::uint64_t, 2> ever_{};
};

/// One realization with a fresh simulator.
RealizationOutcome simulate(const LayeredNetwork& net, const EpidemicParams& params, std::span<const NodeRef> seeds,
                            Seed rng_seed, const SimulationOptions& options = {});

/// Initially infected nodes: `count` distinct nodes of one layer per realization.
struct SeedStrategy {
  Layer layer = Layer::second;
  std::uint64_t count = 10;
};

/// Seed nodes of the realization with seed `realization_seed`, drawn from
/// the sub-stream derive_seed(realization_seed, kSeedNodeStream).
std::vector<NodeRef> draw_seed_nodes(const LayeredNetwork& net, const SeedStrategy& strategy, Seed realization_seed);

struct EnsembleOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  SimulationOptions simulation;
};

/// Realization r runs simulate(net, params, draw_seed_nodes(net, strategy, s_r), s_r)
/// with s_r = derive_seed(master_seed, r). Output is ordered by r.
std::vector<RealizationOutcome> run_ensemble(const LayeredNetwork& net, const EpidemicParams& params,
                                             const SeedStrategy& strategy, std::size_t realizations, Seed master_seed,
                                             const EnsembleOptions& options = {});

/// "t,node,layer,transition"
void write_events_csv(std::ostream& out, const RealizationOutcome& outcome);
/// "realization,ever_infected_layer1,ever_infected_layer2,extinction_time"
void write_ensemble_csv(std::ostream& out, std::span<const RealizationOutcome> outcomes);

}  // namespace netspill::stochastic
