#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "netspill/graph.hpp"
#include "netspill/params.hpp"
#include "netspill/rng.hpp"

namespace netspill::meanfield {

/// Per-node compartment probabilities.
struct NodeState {
  double s = 1.0;
  double i = 0.0;
  double r = 0.0;
};

/// Expected compartment counts of one layer.
struct Compartments {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
};

/// Nodes are ordered layer 1 first (0..n1-1), then layer 2.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<NodeState>> states;       // empty unless node states are kept
  std::vector<std::array<Compartments, 2>> layers;  // one entry per sample
  NodeId n1 = 0;
  NodeId n2 = 0;
};

struct IntegrateOptions {
  double t_end = 30.0;
  double dt = 0.01;
  std::size_t sample_every = 1;  // record every k-th step (the final step is always recorded)
  bool keep_node_states = true;
};

/// Classic fourth-order Runge-Kutta on the node-level SIR equations
///   ds/dt = -s P,  di/dt = s P - mu i,  dr/dt = mu i,
/// with infection pressure P_v = beta_m1 sum_{z in layer 1} a_vz i_z
///                              + beta_m2 sum_{z in layer 2} a_vz i_z
/// for v in layer m. Throws StepSizeError when a node leaves the
/// probability simplex by more than 1e-6. Reported values are clamped at 0.
Trajectory integrate(const LayeredNetwork& net, const EpidemicParams& params, std::span<const NodeState> init,
                     const IntegrateOptions& options = {});

/// i = 1 on round(fraction * n) nodes of each layer (at least one when
/// fraction > 0), chosen uniformly by seed; every other node susceptible.
std::vector<NodeState> seeded_initial_state(const LayeredNetwork& net, double fraction, Seed seed);

struct GrowthIndicator {
  double initial_rate = 0.0;  // (d/dt sum_v i_v) / sum_v i_v at t = 0+, linearised
  double horizon_rate = 0.0;  // log(mass(horizon) / mass(0)) / horizon of the linear system
  int sign = 0;               // sign of initial_rate
};

/// Growth of the infected mass under di/dt = ([beta blocks] - mu I) i.
/// Requires max_v i_v <= 0.01 and some infected mass. horizon = 0 skips
/// the linear integration.
GrowthIndicator linearized_growth_check(const LayeredNetwork& net, const EpidemicParams& params,
                                        std::span<const NodeState> init, double horizon);

/// "t,layer,S,I,R" aggregate rows.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// "t,layer,node,s,i,r" per-node rows; node is the index within its layer.
void write_node_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace netspill::meanfield
