#include "netspill/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "netspill/errors.hpp"
#include "netspill/format.hpp"

namespace netspill::meanfield {

namespace {

constexpr double kSimplexTolerance = 1e-6;

// Infection pressure on every node for infected probabilities i.
void pressure(const LayeredNetwork& net, const EpidemicParams& p, std::span<const double> i,
              std::span<double> out) {
  const NodeId n1 = net.n1();
  const NodeId n2 = net.n2();
  auto i1 = i.first(n1);
  auto i2 = i.subspan(n1, n2);
  for (NodeId v = 0; v < n1; ++v) {
    double within = 0.0, across = 0.0;
    for (NodeId z : net.layer1().neighbors(v)) within += i1[z];
    for (NodeId z : net.partners_of_layer1(v)) across += i2[z];
    out[v] = p.beta11 * within + p.beta12 * across;
  }
  for (NodeId v = 0; v < n2; ++v) {
    double within = 0.0, across = 0.0;
    for (NodeId z : net.layer2().neighbors(v)) within += i2[z];
    for (NodeId z : net.partners_of_layer2(v)) across += i1[z];
    out[n1 + v] = p.beta22 * within + p.beta21 * across;
  }
}

struct State {
  std::vector<double> s, i, r;
  explicit State(std::size_t n = 0) : s(n), i(n), r(n) {}
};

class Rhs {
 public:
  Rhs(const LayeredNetwork& net, const EpidemicParams& p) : net_(net), p_(p), force_(net.n1() + net.n2()) {}

  void operator()(const State& x, State& dx) {
    pressure(net_, p_, x.i, force_);
    for (std::size_t v = 0; v < force_.size(); ++v) {
      const double infection = x.s[v] * force_[v];
      const double recovery = p_.mu * x.i[v];
      dx.s[v] = -infection;
      dx.i[v] = infection - recovery;
      dx.r[v] = recovery;
    }
  }

 private:
  const LayeredNetwork& net_;
  const EpidemicParams& p_;
  std::vector<double> force_;
};

void axpy(State& out, const State& x, double h, const State& k) {
  for (std::size_t v = 0; v < x.s.size(); ++v) {
    out.s[v] = x.s[v] + h * k.s[v];
    out.i[v] = x.i[v] + h * k.i[v];
    out.r[v] = x.r[v] + h * k.r[v];
  }
}

void check_simplex(const State& x, double t) {
  for (std::size_t v = 0; v < x.s.size(); ++v) {
    const double total = x.s[v] + x.i[v] + x.r[v];
    const double lowest = std::min({x.s[v], x.i[v], x.r[v]});
    if (std::abs(total - 1.0) > kSimplexTolerance || lowest < -kSimplexTolerance || !std::isfinite(total)) {
      throw StepSizeError("node " + std::to_string(v) + " left the probability simplex at t=" + format_double(t) +
                          "; use a smaller dt");
    }
  }
}

void record(Trajectory& traj, const State& x, double t, NodeId n1, bool keep_nodes) {
  traj.times.push_back(t);
  std::array<Compartments, 2> agg{};
  std::vector<NodeState> nodes;
  if (keep_nodes) nodes.resize(x.s.size());
  for (std::size_t v = 0; v < x.s.size(); ++v) {
    const NodeState ns{std::max(x.s[v], 0.0), std::max(x.i[v], 0.0), std::max(x.r[v], 0.0)};
    auto& layer = agg[v < n1 ? 0 : 1];
    layer.s += ns.s;
    layer.i += ns.i;
    layer.r += ns.r;
    if (keep_nodes) nodes[v] = ns;
  }
  traj.layers.push_back(agg);
  if (keep_nodes) traj.states.push_back(std::move(nodes));
}

void validate_init(const LayeredNetwork& net, std::span<const NodeState> init) {
  if (init.size() != static_cast<std::size_t>(net.n1()) + net.n2()) {
    throw ParameterError("initial state must hold one entry per node of both layers");
  }
  for (std::size_t v = 0; v < init.size(); ++v) {
    const auto& x = init[v];
    if (x.s < 0.0 || x.i < 0.0 || x.r < 0.0 || std::abs(x.s + x.i + x.r - 1.0) > 1e-9) {
      throw ParameterError("initial state of node " + std::to_string(v) + " is not a probability triple");
    }
  }
}

}  // namespace

Trajectory integrate(const LayeredNetwork& net, const EpidemicParams& params, std::span<const NodeState> init,
                     const IntegrateOptions& options) {
  params.validate();
  validate_init(net, init);
  if (!(options.dt > 0.0)) throw ParameterError("dt must be positive");
  if (!(options.t_end >= 0.0)) throw ParameterError("t_end must be non-negative");
  if (options.sample_every == 0) throw ParameterError("sample_every must be positive");

  const std::size_t n = init.size();
  State x(n);
  for (std::size_t v = 0; v < n; ++v) {
    x.s[v] = init[v].s;
    x.i[v] = init[v].i;
    x.r[v] = init[v].r;
  }

  Trajectory traj;
  traj.n1 = net.n1();
  traj.n2 = net.n2();
  record(traj, x, 0.0, net.n1(), options.keep_node_states);

  const auto steps = static_cast<std::size_t>(std::ceil(options.t_end / options.dt - 1e-9));
  Rhs rhs(net, params);
  State k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t step = 1; step <= steps; ++step) {
    const double t0 = static_cast<double>(step - 1) * options.dt;
    const double t1 = step == steps ? options.t_end : static_cast<double>(step) * options.dt;
    const double h = t1 - t0;
    rhs(x, k1);
    axpy(tmp, x, h / 2, k1);
    rhs(tmp, k2);
    axpy(tmp, x, h / 2, k2);
    rhs(tmp, k3);
    axpy(tmp, x, h, k3);
    rhs(tmp, k4);
    for (std::size_t v = 0; v < n; ++v) {
      x.s[v] += h / 6 * (k1.s[v] + 2 * k2.s[v] + 2 * k3.s[v] + k4.s[v]);
      x.i[v] += h / 6 * (k1.i[v] + 2 * k2.i[v] + 2 * k3.i[v] + k4.i[v]);
      x.r[v] += h / 6 * (k1.r[v] + 2 * k2.r[v] + 2 * k3.r[v] + k4.r[v]);
    }
    check_simplex(x, t1);
    if (step % options.sample_every == 0 || step == steps) {
      record(traj, x, t1, net.n1(), options.keep_node_states);
    }
  }
  return traj;
}

std::vector<NodeState> seeded_initial_state(const LayeredNetwork& net, double fraction, Seed seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ParameterError("initial infected fraction must lie in [0, 1]");
  std::vector<NodeState> init(static_cast<std::size_t>(net.n1()) + net.n2());
  Rng rng(seed);
  std::size_t offset = 0;
  for (NodeId n : {net.n1(), net.n2()}) {
    auto k = static_cast<std::uint64_t>(std::floor(fraction * n + 0.5));
    if (fraction > 0.0 && n > 0) k = std::max<std::uint64_t>(k, 1);
    for (std::uint64_t v : sample_without_replacement(n, k, rng)) init[offset + v] = {0.0, 1.0, 0.0};
    offset += n;
  }
  return init;
}

GrowthIndicator linearized_growth_check(const LayeredNetwork& net, const EpidemicParams& params,
                                        std::span<const NodeState> init, double horizon) {
  params.validate();
  validate_init(net, init);
  if (!(horizon >= 0.0)) throw ParameterError("horizon must be non-negative");
  const std::size_t n = init.size();
  std::vector<double> i(n);
  double mass = 0.0, peak = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    i[v] = init[v].i;
    mass += i[v];
    peak = std::max(peak, i[v]);
  }
  if (peak > 0.01) throw ParameterError("linearisation needs small infected mass (max i <= 0.01)");
  if (!(mass > 0.0)) throw ParameterError("linearisation needs a non-zero infected vector");

  // d/dt i = P(i) - mu i with S = 1.
  std::vector<double> force(n);
  auto derivative = [&](std::span<const double> x, std::span<double> dx) {
    pressure(net, params, x, force);
    for (std::size_t v = 0; v < n; ++v) dx[v] = force[v] - params.mu * x[v];
  };

  std::vector<double> d(n);
  derivative(i, d);
  GrowthIndicator g;
  double change = 0.0;
  for (double x : d) change += x;
  g.initial_rate = change / mass;
  g.sign = (g.initial_rate > 0.0) - (g.initial_rate < 0.0);
  if (horizon == 0.0) {
    g.horizon_rate = g.initial_rate;
    return g;
  }

  // RK4 with renormalisation so the linear system cannot overflow.
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / 0.01));
  const double h = horizon / static_cast<double>(steps);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double log_scale = 0.0;
  for (std::size_t step = 0; step < steps; ++step) {
    derivative(i, k1);
    for (std::size_t v = 0; v < n; ++v) tmp[v] = i[v] + h / 2 * k1[v];
    derivative(tmp, k2);
    for (std::size_t v = 0; v < n; ++v) tmp[v] = i[v] + h / 2 * k2[v];
    derivative(tmp, k3);
    for (std::size_t v = 0; v < n; ++v) tmp[v] = i[v] + h * k3[v];
    derivative(tmp, k4);
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      i[v] += h / 6 * (k1[v] + 2 * k2[v] + 2 * k3[v] + k4[v]);
      total += i[v];
    }
    if (!(total > 0.0)) break;
    log_scale += std::log(total);
    for (double& x : i) x /= total;
  }
  g.horizon_rate = (log_scale - std::log(mass)) / horizon;
  return g;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,layer,S,I,R\n";
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    for (int layer = 0; layer < 2; ++layer) {
      const auto& c = trajectory.layers[k][layer];
      out << format_double(trajectory.times[k]) << ',' << layer + 1 << ',' << format_double(c.s) << ','
          << format_double(c.i) << ',' << format_double(c.r) << '\n';
    }
  }
}

void write_node_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,layer,node,s,i,r\n";
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const auto& nodes = trajectory.states[k];
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      const bool first = v < trajectory.n1;
      out << format_double(trajectory.times[k]) << ',' << (first ? 1 : 2) << ','
          << (first ? v : v - trajectory.n1) << ',' << format_double(nodes[v].s) << ','
          << format_double(nodes[v].i) << ',' << format_double(nodes[v].r) << '\n';
    }
  }
}

}  // namespace netspill::meanfield
