#include <algorithm>
#include <bit>
#include <ostream>
#include <string>

#include "netspill/errors.hpp"
#include "netspill/format.hpp"
#include "netspill/parallel.hpp"
#include "netspill/stochastic.hpp"

namespace netspill::stochastic {

void Simulator::RateTree::resize(std::size_t n) {
  leaves_ = std::bit_ceil(std::max<std::size_t>(n, 1));
  tree_.assign(2 * leaves_, 0.0);
}

void Simulator::RateTree::set(std::size_t i, double rate) {
  std::size_t k = leaves_ + i;
  tree_[k] = rate;
  for (k >>= 1; k >= 1; k >>= 1) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
}

std::size_t Simulator::RateTree::sample(double u) const noexcept {
  std::size_t k = 1;
  while (k < leaves_) {
    const double left = tree_[2 * k];
    if (u < left || tree_[2 * k + 1] <= 0.0) {
      k = 2 * k;
    } else {
      u -= left;
      k = 2 * k + 1;
    }
  }
  return k - leaves_;
}

void Simulator::RateTree::rebuild() {
  for (std::size_t k = leaves_ - 1; k >= 1; --k) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
}

void Simulator::prepare(std::size_t n) {
  if (state_.size() != n) {
    state_.assign(n, State::susceptible);
    from_layer1_.assign(n, 0);
    from_layer2_.assign(n, 0);
    touched_flag_.assign(n, 0);
    touched_.clear();
    rates_.resize(n);
    return;
  }
  if (touched_.size() > n / 8) {
    std::fill(state_.begin(), state_.end(), State::susceptible);
    std::fill(from_layer1_.begin(), from_layer1_.end(), 0);
    std::fill(from_layer2_.begin(), from_layer2_.end(), 0);
    std::fill(touched_flag_.begin(), touched_flag_.end(), 0);
    rates_.resize(n);
  } else {
    for (std::size_t v : touched_) {
      state_[v] = State::susceptible;
      from_layer1_[v] = 0;
      from_layer2_[v] = 0;
      touched_flag_[v] = 0;
      if (rates_.leaf(v) != 0.0) rates_.set(v, 0.0);
    }
  }
  touched_.clear();
}

void Simulator::touch(std::size_t v) {
  if (!touched_flag_[v]) {
    touched_flag_[v] = 1;
    touched_.push_back(v);
  }
}

template <class Visit>
void Simulator::for_each_neighbor(std::size_t v, Visit&& visit) const {
  if (v < n1_) {
    const auto u = static_cast<NodeId>(v);
    for (NodeId z : net_->layer1().neighbors(u)) visit(static_cast<std::size_t>(z));
    for (NodeId w : net_->partners_of_layer1(u)) visit(static_cast<std::size_t>(n1_) + w);
  } else {
    const auto w = static_cast<NodeId>(v - n1_);
    for (NodeId z : net_->layer2().neighbors(w)) visit(static_cast<std::size_t>(n1_) + z);
    for (NodeId u : net_->partners_of_layer2(w)) visit(static_cast<std::size_t>(u));
  }
}

double Simulator::infection_rate(std::size_t v) const noexcept {
  if (v < n1_) return params_.beta11 * from_layer1_[v] + params_.beta12 * from_layer2_[v];
  return params_.beta21 * from_layer1_[v] + params_.beta22 * from_layer2_[v];
}

void Simulator::infect(std::size_t v) {
  state_[v] = State::infected;
  ++ever_[v < n1_ ? 0 : 1];
  touch(v);
  rates_.set(v, params_.mu);
  auto& counts = v < n1_ ? from_layer1_ : from_layer2_;
  for_each_neighbor(v, [&](std::size_t z) {
    ++counts[z];
    touch(z);
    if (state_[z] == State::susceptible) {
      const double rate = infection_rate(z);
      if (rates_.leaf(z) != rate) rates_.set(z, rate);
    }
  });
}

void Simulator::recover(std::size_t v) {
  state_[v] = State::recovered;
  rates_.set(v, 0.0);
  auto& counts = v < n1_ ? from_layer1_ : from_layer2_;
  for_each_neighbor(v, [&](std::size_t z) {
    --counts[z];
    if (state_[z] == State::susceptible) {
      const double rate = infection_rate(z);
      if (rates_.leaf(z) != rate) rates_.set(z, rate);
    }
  });
}

RealizationOutcome Simulator::run(const LayeredNetwork& net, const EpidemicParams& params,
                                  std::span<const NodeRef> seeds, Seed rng_seed, const SimulationOptions& options) {
  params.validate();
  net_ = &net;
  params_ = params;
  n1_ = net.n1();
  const std::size_t n = static_cast<std::size_t>(net.n1()) + net.n2();
  prepare(n);
  ever_ = {0, 0};

  RealizationOutcome out;
  out.rng_seed = rng_seed;
  for (const NodeRef& s : seeds) {
    const NodeId limit = s.layer == Layer::first ? net.n1() : net.n2();
    if (s.node >= limit) throw ParameterError("seed node " + std::to_string(s.node) + " out of range");
    const std::size_t v = s.layer == Layer::first ? s.node : static_cast<std::size_t>(n1_) + s.node;
    if (state_[v] == State::susceptible) infect(v);
  }

  Rng rng(rng_seed);
  double t = 0.0;
  while (rates_.total() > 0.0) {
    const double total = rates_.total();
    const double wait = rng.exponential(total);
    if (t + wait > options.t_max) {
      t = options.t_max;
      out.truncated = true;
      break;
    }
    t += wait;
    const std::size_t v = rates_.sample(rng.uniform() * total);
    const bool recovery = state_[v] == State::infected;
    if (recovery) {
      recover(v);
    } else {
      infect(v);
    }
    if (options.record_events) {
      const bool first = v < n1_;
      out.log.push_back({t,
                         {first ? Layer::first : Layer::second, static_cast<NodeId>(first ? v : v - n1_)},
                         recovery ? Transition::recovery : Transition::infection});
    }
    if (++out.events % kRebuildInterval == 0) rates_.rebuild();
  }
  out.extinction_time = t;
  out.ever_infected = ever_;
  return out;
}

RealizationOutcome simulate(const LayeredNetwork& net, const EpidemicParams& params, std::span<const NodeRef> seeds,
                            Seed rng_seed, const SimulationOptions& options) {
  Simulator sim;
  return sim.run(net, params, seeds, rng_seed, options);
}

std::vector<NodeRef> draw_seed_nodes(const LayeredNetwork& net, const SeedStrategy& strategy,
                                     Seed realization_seed) {
  const NodeId size = strategy.layer == Layer::first ? net.n1() : net.n2();
  if (strategy.count > size) {
    throw ParameterError("cannot seed " + std::to_string(strategy.count) + " nodes in a layer of " +
                         std::to_string(size));
  }
  Rng rng(derive_seed(realization_seed, kSeedNodeStream));
  std::vector<NodeRef> seeds;
  seeds.reserve(strategy.count);
  for (std::uint64_t v : sample_without_replacement(size, strategy.count, rng)) {
    seeds.push_back({strategy.layer, static_cast<NodeId>(v)});
  }
  return seeds;
}

std::vector<RealizationOutcome> run_ensemble(const LayeredNetwork& net, const EpidemicParams& params,
                                             const SeedStrategy& strategy, std::size_t realizations, Seed master_seed,
                                             const EnsembleOptions& options) {
  if (realizations == 0) throw ParameterError("ensemble needs at least one realization");
  std::vector<RealizationOutcome> outcomes(realizations);
  std::vector<Simulator> workers(worker_count(realizations, options.threads));
  parallel_for(realizations, options.threads, [&](std::size_t r, unsigned worker) {
    const Seed seed = derive_seed(master_seed, r);
    const auto seeds = draw_seed_nodes(net, strategy, seed);
    outcomes[r] = workers[worker].run(net, params, seeds, seed, options.simulation);
  });
  return outcomes;
}

void write_events_csv(std::ostream& out, const RealizationOutcome& outcome) {
  out << "t,node,layer,transition\n";
  for (const Event& e : outcome.log) {
    out << format_double(e.t) << ',' << e.node.node << ',' << (e.node.layer == Layer::first ? 1 : 2) << ','
        << (e.transition == Transition::infection ? "S->I" : "I->R") << '\n';
  }
}

void write_ensemble_csv(std::ostream& out, std::span<const RealizationOutcome> outcomes) {
  out << "realization,ever_infected_layer1,ever_infected_layer2,extinction_time\n";
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    out << r << ',' << outcomes[r].ever_infected[0] << ',' << outcomes[r].ever_infected[1] << ','
        << format_double(outcomes[r].extinction_time) << '\n';
  }
}

}  // namespace netspill::stochastic
