#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "oracles/final_size.hpp"
#include "netspill/errors.hpp"
#include "netspill/spectral.hpp"
#include "netspill/stochastic.hpp"

using namespace netspill;
using namespace netspill::stochastic;

using oracle::Enumerator;

namespace {

std::shared_ptr<const Graph> path_graph(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
  return std::make_shared<const Graph>(Graph::from_edges(n, edges));
}

LayeredNetwork er_scenario(std::uint64_t links) {
  auto g1 = std::make_shared<const Graph>(gen_erdos_renyi_gnm(1000, 3255, 1));
  auto g2 = std::make_shared<const Graph>(gen_erdos_renyi_gnm(1000, 3255, 2));
  return couple_random(g1, g2, LinkSpec::count(links), 3);
}

EpidemicParams er_params() {
  EpidemicParams p;
  p.beta22 = 0.15;
  p.beta12 = 0.02;
  return p;
}

}  // namespace

TEST_CASE("no seeds means no epidemic") {
  const auto net = er_scenario(1350);
  const auto out = simulate(net, er_params(), {}, 5);
  CHECK(out.events == 0);
  CHECK(out.ever_infected[0] == 0);
  CHECK(out.ever_infected[1] == 0);
  CHECK(out.extinction_time == 0.0);
}

TEST_CASE("without transmission only seeds are infected") {
  const auto net = er_scenario(1350);
  const std::vector<NodeRef> seeds{{Layer::second, 3}, {Layer::second, 9}, {Layer::first, 4}};
  SimulationOptions logged;
  logged.record_events = true;
  double mean_time = 0.0;
  const int runs = 20000;
  for (int r = 0; r < runs; ++r) {
    const auto out = simulate(net, EpidemicParams{}, seeds, derive_seed(8, r), logged);
    REQUIRE(out.ever_infected[0] == 1);
    REQUIRE(out.ever_infected[1] == 2);
    REQUIRE(out.log.size() == 3);
    CHECK(out.extinction_time == out.log.back().t);
    mean_time += out.extinction_time;
  }
  mean_time /= runs;
  // max of three unit exponentials: mean 1 + 1/2 + 1/3, variance 1 + 1/4 + 1/9
  const double expected = 1.0 + 0.5 + 1.0 / 3.0;
  const double se = std::sqrt((1.0 + 0.25 + 1.0 / 9.0) / runs);
  CHECK(std::abs(mean_time - expected) < 4.0 * se);
}

TEST_CASE("two-node infection probability") {
  const double beta = 0.7, mu = 1.0;
  const std::vector<Edge> edge{{0, 1}};
  const LayeredNetwork net(Graph::from_edges(2, edge), Graph(1), {});
  EpidemicParams p;
  p.beta11 = beta;
  p.mu = mu;
  const std::vector<NodeRef> seed{{Layer::first, 0}};
  const int runs = 100000;
  int hits = 0;
  Simulator sim;
  for (int r = 0; r < runs; ++r) hits += sim.run(net, p, seed, derive_seed(1, r)).ever_infected[0] == 2;
  const double expected = beta / (beta + mu);
  const double se = std::sqrt(expected * (1 - expected) / runs);
  CHECK(std::abs(static_cast<double>(hits) / runs - expected) < 3.0 * se);
}

TEST_CASE("final size distribution matches exhaustive enumeration") {
  struct Case {
    const char* name;
    LayeredNetwork net;
    EpidemicParams params;
    std::vector<NodeRef> seeds;
    std::vector<int> flat_seeds;
  };
  EpidemicParams path_params;
  path_params.beta11 = 1.3;
  EpidemicParams cross;
  cross.beta11 = 0.8;
  cross.beta22 = 1.1;
  cross.beta12 = 0.6;
  cross.beta21 = 0.3;
  cross.mu = 0.9;
  const std::vector<Edge> k2{{0, 1}};
  const std::vector<InterLink> links{{0, 0}, {1, 1}};
  std::vector<Case> cases;
  cases.push_back({"3-node path, end seed", LayeredNetwork(path_graph(3), std::make_shared<const Graph>(Graph(1)), {}),
                   path_params, {{Layer::first, 0}}, {0}});
  cases.push_back({"3-node path, middle seed",
                   LayeredNetwork(path_graph(3), std::make_shared<const Graph>(Graph(1)), {}), path_params,
                   {{Layer::first, 1}}, {1}});
  cases.push_back({"two coupled pairs", LayeredNetwork(Graph::from_edges(2, k2), Graph::from_edges(2, k2), links),
                   cross, {{Layer::second, 0}}, {2}});

  for (auto& c : cases) {
    CAPTURE(c.name);
    const auto oracle = Enumerator(c.net, c.params).final_sizes(c.flat_seeds);
    const int runs = 100000;
    std::map<int, int> counts;
    Simulator sim;
    for (int r = 0; r < runs; ++r) {
      const auto out = sim.run(c.net, c.params, c.seeds, derive_seed(99, r));
      ++counts[static_cast<int>(out.ever_infected[0] + out.ever_infected[1])];
    }
    double total = 0.0;
    for (const auto& [size, prob] : oracle) {
      total += prob;
      const double sigma = std::sqrt(prob * (1 - prob) / runs);
      CHECK(std::abs(static_cast<double>(counts[size]) / runs - prob) <= 3.0 * sigma + 1e-12);
    }
    CHECK(total == doctest::Approx(1.0));
    for (const auto& [size, n] : counts) CHECK(oracle.contains(size));
  }
}

TEST_CASE("event log is ordered and follows S to I to R") {
  const auto net = er_scenario(1350);
  auto p = er_params();
  p.beta22 = 0.4;
  p.beta11 = 0.3;
  const auto seeds = draw_seed_nodes(net, {Layer::second, 10}, 4);
  SimulationOptions opts;
  opts.record_events = true;
  const auto out = simulate(net, p, seeds, 4, opts);
  REQUIRE(out.log.size() == out.events);
  std::map<NodeRef, int> stage;
  for (const auto& s : seeds) stage[s] = 1;
  for (std::size_t k = 0; k < out.log.size(); ++k) {
    const auto& e = out.log[k];
    if (k > 0) CHECK(e.t > out.log[k - 1].t);
    int& st = stage[e.node];
    if (e.transition == Transition::infection) {
      CHECK(st == 0);
      st = 1;
    } else {
      CHECK(st == 1);
      st = 2;
    }
  }
  std::array<std::uint64_t, 2> ever{};
  for (const auto& [node, st] : stage) {
    CHECK(st == 2);
    ++ever[static_cast<int>(node.layer)];
  }
  CHECK(ever == out.ever_infected);
  CHECK(out.ever_infected[1] >= 10);
}

TEST_CASE("seed validation") {
  const LayeredNetwork net(Graph(3), Graph(2), {});
  const std::vector<NodeRef> bad{{Layer::second, 2}};
  CHECK_THROWS_AS(simulate(net, EpidemicParams{}, bad, 1), ParameterError);
  const std::vector<NodeRef> dup{{Layer::first, 1}, {Layer::first, 1}};
  CHECK(simulate(net, EpidemicParams{}, dup, 1).ever_infected[0] == 1);
  CHECK_THROWS_AS(draw_seed_nodes(net, {Layer::second, 3}, 1), ParameterError);
  EpidemicParams negative;
  negative.beta11 = -1.0;
  CHECK_THROWS_AS(simulate(net, negative, {}, 1), ParameterError);
}

TEST_CASE("t_max truncates") {
  const auto net = er_scenario(1350);
  auto p = er_params();
  p.beta22 = 1.0;
  const auto seeds = draw_seed_nodes(net, {Layer::second, 10}, 2);
  SimulationOptions opts;
  opts.t_max = 0.5;
  const auto out = simulate(net, p, seeds, 2, opts);
  CHECK(out.truncated);
  CHECK(out.extinction_time == 0.5);
}

TEST_CASE("ensembles are deterministic and ordered") {
  const auto net = er_scenario(1350);
  const auto p = er_params();
  const SeedStrategy strategy{Layer::second, 10};
  const auto single = run_ensemble(net, p, strategy, 1, 77);
  const Seed s0 = derive_seed(77, 0);
  const auto direct = simulate(net, p, draw_seed_nodes(net, strategy, s0), s0);
  CHECK(single[0].ever_infected == direct.ever_infected);
  CHECK(single[0].extinction_time == direct.extinction_time);

  EnsembleOptions one, three;
  one.threads = 1;
  three.threads = 3;
  const auto a = run_ensemble(net, p, strategy, 300, 77, one);
  const auto b = run_ensemble(net, p, strategy, 300, 77, three);
  const auto c = run_ensemble(net, p, strategy, 300, 77, one);
  std::ostringstream sa, sb, sc;
  write_ensemble_csv(sa, a);
  write_ensemble_csv(sb, b);
  write_ensemble_csv(sc, c);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() == sc.str());
  CHECK(sa.str().rfind("realization,ever_infected_layer1,ever_infected_layer2,extinction_time\n", 0) == 0);
}

TEST_CASE("reservoir scenario produces outbreaks with spread in spillover sizes") {
  const auto net = er_scenario(1350);
  const auto outcomes = run_ensemble(net, er_params(), {Layer::second, 10}, 2000, 2024);
  double reservoir = 0.0;
  std::uint64_t lo = UINT64_MAX, hi = 0;
  for (const auto& o : outcomes) {
    reservoir += static_cast<double>(o.ever_infected[1]);
    lo = std::min(lo, o.ever_infected[0]);
    hi = std::max(hi, o.ever_infected[0]);
    CHECK(o.ever_infected[1] >= 10);
  }
  CHECK(reservoir / 2000.0 > 10.0);
  CHECK(hi > lo);
}

TEST_CASE("relabelling nodes leaves the final size distribution unchanged") {
  const Graph g = gen_erdos_renyi_gnm(10, 18, 6);
  std::vector<NodeId> perm(10);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  Rng rng(3);
  for (NodeId k = 9; k > 0; --k) std::swap(perm[k], perm[rng.below(k + 1)]);
  std::vector<Edge> relabelled;
  for (const auto& e : g.edges()) relabelled.push_back({perm[e.u], perm[e.v]});
  const LayeredNetwork a(g, Graph(1), {});
  const LayeredNetwork b(Graph::from_edges(10, relabelled), Graph(1), {});
  EpidemicParams p;
  p.beta11 = 0.6;
  const int runs = 40000;
  const std::vector<NodeRef> seeds_a{{Layer::first, 2}};
  const std::vector<NodeRef> seeds_b{{Layer::first, perm[2]}};
  double ma = 0, mb = 0, va = 0, vb = 0;
  Simulator sim;
  for (int r = 0; r < runs; ++r) {
    const double xa = static_cast<double>(sim.run(a, p, seeds_a, derive_seed(1, r)).ever_infected[0]);
    const double xb = static_cast<double>(sim.run(b, p, seeds_b, derive_seed(2, r)).ever_infected[0]);
    ma += xa;
    mb += xb;
    va += xa * xa;
    vb += xb * xb;
  }
  ma /= runs;
  mb /= runs;
  va = va / runs - ma * ma;
  vb = vb / runs - mb * mb;
  CHECK(std::abs(ma - mb) < 4.0 * std::sqrt((va + vb) / runs));
}

TEST_CASE("ensemble mean agrees with the mean-field growth sign") {
  auto g1 = std::make_shared<const Graph>(gen_watts_strogatz(500, 20, 0.2, 1));
  auto g2 = std::make_shared<const Graph>(gen_watts_strogatz(100, 4, 0.1, 2));
  const double l1 = spectral::adjacency_spectral_radius(*g1);
  const double l2 = spectral::adjacency_spectral_radius(*g2);
  const auto params = EpidemicParams::coupled(0.4 / l1, 0.4 / l2, 1.0);
  const auto strong = couple_random(g1, g2, LinkSpec::probability(0.2), 3);
  const auto weak = couple_random(g1, g2, LinkSpec::probability(0.01), 3);
  CHECK(spectral::jacobian_leading_eigenvalue(strong, params) > 0.0);
  CHECK(spectral::jacobian_leading_eigenvalue(weak, params) < 0.0);

  // mean number infected at t = 0.5 against the 6 seeds present at t = 0
  auto mean_infected = [&](const LayeredNetwork& net) {
    SimulationOptions opts;
    opts.record_events = true;
    double total = 0.0;
    const int runs = 400;
    for (int r = 0; r < runs; ++r) {
      const Seed s = derive_seed(55, r);
      auto seeds = draw_seed_nodes(net, {Layer::first, 5}, s);
      seeds.push_back(draw_seed_nodes(net, {Layer::second, 1}, derive_seed(s, 1))[0]);
      const auto out = simulate(net, params, seeds, s, opts);
      int infected = 6;
      for (const auto& e : out.log) {
        if (e.t > 0.5) break;
        infected += e.transition == Transition::infection ? 1 : -1;
      }
      total += infected;
    }
    return total / runs;
  };
  CHECK(mean_infected(strong) > 6.0);
  CHECK(mean_infected(weak) < 6.0);
}

TEST_CASE("large outbreaks cross the rate-tree rebuild interval") {
  auto g = std::make_shared<const Graph>(gen_erdos_renyi_gnm(8000, 40000, 4));
  const LayeredNetwork net(g, std::make_shared<const Graph>(Graph(1)), {});
  EpidemicParams p;
  p.beta11 = 2.0;
  const auto seeds = draw_seed_nodes(net, {Layer::first, 5}, 1);
  const auto out = simulate(net, p, seeds, 1);
  CHECK(out.events > Simulator::kRebuildInterval);
  CHECK(out.events == 2 * out.ever_infected[0] - 5);
}

TEST_CASE("one realization of the reservoir scenario is fast") {
  const auto net = er_scenario(1350);
  const auto p = er_params();
  Simulator sim;
  const int runs = 200;
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < runs; ++r) {
    const Seed s = derive_seed(3, r);
    sim.run(net, p, draw_seed_nodes(net, {Layer::second, 10}, s), s);
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  CHECK(ms / runs < 50.0);
}

TEST_CASE("event csv") {
  const std::vector<Edge> edge{{0, 1}};
  const LayeredNetwork net(Graph::from_edges(2, edge), Graph(1), {});
  EpidemicParams p;
  p.beta11 = 5.0;
  const std::vector<NodeRef> seed{{Layer::first, 0}};
  SimulationOptions opts;
  opts.record_events = true;
  const auto out = simulate(net, p, seed, 3, opts);
  std::ostringstream csv;
  write_events_csv(csv, out);
  CHECK(csv.str().rfind("t,node,layer,transition\n", 0) == 0);
  CHECK(csv.str().find("I->R") != std::string::npos);
}
