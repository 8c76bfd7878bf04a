#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <doctest.h>

#include "helpers.hpp"
#include "netspill/errors.hpp"
#include "netspill/graph.hpp"

using namespace netspill;
using testutil::check_graph_invariants;

TEST_CASE("graph from edges validates input") {
  const std::vector<Edge> triangle{{0, 1}, {2, 1}, {0, 2}};
  const Graph g = Graph::from_edges(3, triangle);
  CHECK(g.num_edges() == 3);
  CHECK(g.degree(1) == 2);
  CHECK(g.has_edge(1, 2));
  check_graph_invariants(g);

  const std::vector<Edge> loop{{1, 1}};
  CHECK_THROWS_AS(Graph::from_edges(3, loop), ParameterError);
  const std::vector<Edge> dup{{0, 1}, {1, 0}};
  CHECK_THROWS_AS(Graph::from_edges(3, dup), ParameterError);
  const std::vector<Edge> out{{0, 3}};
  CHECK_THROWS_AS(Graph::from_edges(3, out), ParameterError);
}

TEST_CASE("erdos renyi G(n,p)") {
  CHECK(gen_erdos_renyi(5, 0.0, 1).num_edges() == 0);
  CHECK(gen_erdos_renyi(5, 1.0, 1).num_edges() == 10);
  CHECK_THROWS_AS(gen_erdos_renyi(5, 1.5, 1), ParameterError);

  const Graph g = gen_erdos_renyi(500, 0.02, 11);
  check_graph_invariants(g);
  const double pairs = 500.0 * 499.0 / 2.0;
  const double mean = 0.02 * pairs;
  const double sd = std::sqrt(pairs * 0.02 * 0.98);
  CHECK(std::abs(static_cast<double>(g.num_edges()) - mean) < 4.0 * sd);
}

TEST_CASE("erdos renyi G(n,m)") {
  const Graph g = gen_erdos_renyi_gnm(1000, 3255, 5);
  CHECK(g.num_edges() == 3255);
  check_graph_invariants(g);

  const Graph k4 = gen_erdos_renyi_gnm(4, 6, 5);
  CHECK(k4.num_edges() == 6);
  for (NodeId v = 0; v < 4; ++v) CHECK(k4.degree(v) == 3);

  CHECK(gen_erdos_renyi_gnm(10, 0, 5).num_edges() == 0);
  CHECK_THROWS_AS(gen_erdos_renyi_gnm(4, 7, 5), ParameterError);

  // dense request goes through the complement path
  const Graph dense = gen_erdos_renyi_gnm(30, 400, 9);
  CHECK(dense.num_edges() == 400);
  check_graph_invariants(dense);
}

TEST_CASE("watts strogatz") {
  const Graph g = gen_watts_strogatz(500, 20, 0.2, 3);
  CHECK(g.num_edges() == 5000);
  check_graph_invariants(g);

  const Graph ring = gen_watts_strogatz(100, 4, 0.0, 3);
  CHECK(ring.num_edges() == 200);
  for (NodeId v = 0; v < 100; ++v) {
    CHECK(ring.degree(v) == 4);
    CHECK(ring.has_edge(v, (v + 1) % 100));
    CHECK(ring.has_edge(v, (v + 2) % 100));
  }

  const Graph rewired = gen_watts_strogatz(100, 4, 0.1, 3);
  CHECK(rewired.num_edges() == 200);
  std::set<std::size_t> degrees;
  for (NodeId v = 0; v < 100; ++v) degrees.insert(rewired.degree(v));
  CHECK(degrees.size() > 1);

  CHECK_THROWS_AS(gen_watts_strogatz(100, 3, 0.1, 3), ParameterError);
  CHECK_THROWS_AS(gen_watts_strogatz(10, 10, 0.1, 3), ParameterError);
}

TEST_CASE("watts strogatz edge count is n k / 2 for any rewiring") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const NodeId n = 10 + static_cast<NodeId>(rng.below(200));
    const NodeId k = 2 * (1 + static_cast<NodeId>(rng.below(std::min<NodeId>(n / 2 - 1, 8))));
    const double p = rng.uniform();
    const Graph g = gen_watts_strogatz(n, k, p, rng.bits());
    CHECK(g.num_edges() == static_cast<std::size_t>(n) * k / 2);
    check_graph_invariants(g);
  }
  // dense corner: nearly complete graph with full rewiring
  const Graph dense = gen_watts_strogatz(8, 6, 1.0, 1);
  CHECK(dense.num_edges() == 24);
  check_graph_invariants(dense);
}

TEST_CASE("barabasi albert") {
  const Graph g = gen_barabasi_albert(1000, 3, 21);
  CHECK(g.num_edges() == 6 + 996 * 3);
  check_graph_invariants(g);
  CHECK_THROWS_AS(gen_barabasi_albert(5, 4, 1), ParameterError);
  CHECK_THROWS_AS(gen_barabasi_albert(5, 0, 1), ParameterError);

  int heavy = 0;
  for (Seed s = 0; s < 100; ++s) {
    const Graph h = gen_barabasi_albert(1000, 3, s);
    if (static_cast<double>(h.max_degree()) >= 5.0 * h.mean_degree()) ++heavy;
  }
  CHECK(heavy >= 95);

  const Graph trimmed = gen_barabasi_albert_edges(1000, 3, 2957, 21);
  CHECK(trimmed.num_edges() == 2957);
  check_graph_invariants(trimmed);
  CHECK_THROWS_AS(gen_barabasi_albert_edges(1000, 3, 3000, 21), ParameterError);
}

TEST_CASE("generators are deterministic in the seed") {
  CHECK(gen_erdos_renyi(300, 0.05, 4) == gen_erdos_renyi(300, 0.05, 4));
  CHECK(gen_erdos_renyi_gnm(300, 900, 4) == gen_erdos_renyi_gnm(300, 900, 4));
  CHECK(gen_watts_strogatz(300, 6, 0.3, 4) == gen_watts_strogatz(300, 6, 0.3, 4));
  CHECK(gen_barabasi_albert(300, 2, 4) == gen_barabasi_albert(300, 2, 4));
  CHECK_FALSE(gen_erdos_renyi_gnm(300, 900, 4) == gen_erdos_renyi_gnm(300, 900, 5));
  CHECK_FALSE(gen_watts_strogatz(300, 6, 0.3, 4) == gen_watts_strogatz(300, 6, 0.3, 5));
}

TEST_CASE("random coupling") {
  auto g1 = std::make_shared<const Graph>(gen_watts_strogatz(500, 20, 0.2, 1));
  auto g2 = std::make_shared<const Graph>(gen_watts_strogatz(100, 4, 0.1, 2));

  const auto net = couple_random(g1, g2, LinkSpec::probability(0.2), 8);
  const double capacity = 500.0 * 100.0;
  const double sd = std::sqrt(capacity * 0.2 * 0.8);
  CHECK(std::abs(static_cast<double>(net.interlinks().size()) - 0.2 * capacity) < 4.0 * sd);

  const auto none = couple_random(g1, g2, LinkSpec::count(0), 8);
  CHECK(none.interlinks().empty());
  CHECK(none.layer1() == *g1);

  auto e1 = std::make_shared<const Graph>(Graph(1000));
  auto e2 = std::make_shared<const Graph>(Graph(1000));
  CHECK(couple_random(e1, e2, LinkSpec::fraction(0.00135), 3).interlinks().size() == 1350);
  CHECK(couple_random(e1, e2, LinkSpec::count(777), 3).interlinks().size() == 777);
  CHECK(LinkSpec::fraction(0.0000005).resolve_count(1000, 1000) == 1);  // half rounds up
  CHECK(LinkSpec::fraction(0.0000004).resolve_count(1000, 1000) == 0);
  CHECK_THROWS_AS(LinkSpec::count(11).resolve_count(2, 5), ParameterError);
  CHECK_THROWS_AS(LinkSpec::probability(1.5), ParameterError);

  const auto full = couple_random(g1, g2, LinkSpec::probability(1.0), 8);
  CHECK(full.interlinks().size() == 50000);
}

TEST_CASE("probability coupling passes a chi-square sanity check") {
  const NodeId n1 = 40, n2 = 25;
  const double omega = 0.1;
  const double capacity = static_cast<double>(n1) * n2;
  const double mean = omega * capacity;
  const double var = capacity * omega * (1 - omega);
  double chi2 = 0.0;
  double total = 0.0;
  const int seeds = 200;
  for (Seed s = 0; s < static_cast<Seed>(seeds); ++s) {
    const double x = static_cast<double>(draw_random_links(n1, n2, LinkSpec::probability(omega), s).size());
    chi2 += (x - mean) * (x - mean) / var;
    total += x;
  }
  // chi-square with 200 dof: mean 200, sd 20
  CHECK(chi2 > 200 - 5 * 20);
  CHECK(chi2 < 200 + 5 * 20);
  CHECK(std::abs(total / seeds - mean) < 4.0 * std::sqrt(var / seeds));
}

TEST_CASE("layered network keeps A21 equal to A12 transpose") {
  auto g1 = std::make_shared<const Graph>(gen_erdos_renyi(30, 0.2, 1));
  auto g2 = std::make_shared<const Graph>(gen_erdos_renyi(20, 0.2, 2));
  const auto net = couple_random(g1, g2, LinkSpec::probability(0.1), 3);
  const Eigen::MatrixXd a12 = testutil::dense_a12(net);
  Eigen::MatrixXd a21 = Eigen::MatrixXd::Zero(20, 30);
  for (NodeId w = 0; w < 20; ++w) {
    for (NodeId u : net.partners_of_layer2(w)) a21(w, u) = 1.0;
  }
  CHECK((a21 - a12.transpose()).norm() == 0.0);

  std::vector<double> x(20), y(30);
  for (NodeId w = 0; w < 20; ++w) x[w] = 0.5 + w;
  net.multiply_a12(x, y);
  const Eigen::VectorXd expect = a12 * Eigen::Map<Eigen::VectorXd>(x.data(), 20);
  for (NodeId u = 0; u < 30; ++u) CHECK(y[u] == doctest::Approx(expect(u)));

  const std::vector<InterLink> dup{{0, 0}, {0, 0}};
  CHECK_THROWS_AS(LayeredNetwork(g1, g2, dup), ParameterError);
  const std::vector<InterLink> out{{30, 0}};
  CHECK_THROWS_AS(LayeredNetwork(g1, g2, out), ParameterError);
}

TEST_CASE("hub coupling") {
  auto g1 = std::make_shared<const Graph>(Graph(1000));
  auto g2 = std::make_shared<const Graph>(gen_barabasi_albert(1000, 3, 4));
  const auto hubs = select_hubs(*g2, 5);
  for (std::size_t k = 1; k < hubs.size(); ++k) CHECK(g2->degree(hubs[k - 1]) >= g2->degree(hubs[k]));
  for (NodeId v = 0; v < g2->size(); ++v) {
    if (std::find(hubs.begin(), hubs.end(), v) == hubs.end()) CHECK(g2->degree(v) <= g2->degree(hubs.back()));
  }

  CHECK(hub_link_counts(180, 5) == std::vector<std::uint64_t>{36, 36, 36, 36, 36});
  CHECK(hub_link_counts(7, 5) == std::vector<std::uint64_t>{2, 2, 1, 1, 1});

  const auto net = couple_to_hubs(g1, g2, 180, 5, 6);
  CHECK(net.interlinks().size() == 180);
  std::set<NodeId> endpoints;
  for (const auto& l : net.interlinks()) endpoints.insert(l.w);
  CHECK(endpoints == std::set<NodeId>(hubs.begin(), hubs.end()));
  for (NodeId h : hubs) CHECK(net.partners_of_layer2(h).size() == 36);

  const auto seven = couple_to_hubs(g1, g2, 7, 5, 6);
  CHECK(seven.partners_of_layer2(hubs[0]).size() == 2);
  CHECK(seven.partners_of_layer2(hubs[4]).size() == 1);

  CHECK(couple_to_hubs(g1, g2, 0, 5, 6).interlinks().empty());
  auto small = std::make_shared<const Graph>(Graph(3));
  CHECK_THROWS_AS(couple_to_hubs(small, g2, 16, 5, 6), ParameterError);
}

TEST_CASE("hub ties go to the lower index") {
  // path 0-1-2-3: nodes 1 and 2 tie at degree 2
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  const Graph g = Graph::from_edges(4, path);
  CHECK(select_hubs(g, 1) == std::vector<NodeId>{1});
  CHECK(select_hubs(g, 3) == std::vector<NodeId>{1, 2, 0});
}

TEST_CASE("edge list files") {
  testutil::TempDir dir("io");
  const Graph k5 = gen_erdos_renyi(5, 1.0, 0);
  save_graph(k5, dir.path() / "k5.edges");
  const Graph back = load_graph(dir.path() / "k5.edges");
  CHECK(back == k5);
  check_graph_invariants(back);

  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir.path() / name) << text;
    return dir.path() / name;
  };
  try {
    load_graph(write("loop.edges", "3 3\n"));
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 1);
  }
  const Graph isolated = load_graph(write("empty.edges", "# n=10\n"));
  CHECK(isolated.size() == 10);
  CHECK(isolated.num_edges() == 0);

  try {
    load_graph(write("bad.edges", "0 1\n1 x\n"));
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_graph(write("range.edges", "# n=3\n0 1\n2 3\n")), FormatError);
  CHECK_THROWS_AS(load_graph(write("dup.edges", "0 1\n1 0\n")), FormatError);
  CHECK_THROWS_AS(load_graph(dir.path() / "missing.edges"), IoError);

  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = gen_erdos_renyi(20 + static_cast<NodeId>(rng.below(50)), 0.1, rng.bits());
    save_graph(g, dir.path() / "r.edges");
    CHECK(load_graph(dir.path() / "r.edges") == g);
  }

  auto g1 = std::make_shared<const Graph>(gen_erdos_renyi(30, 0.1, 1));
  auto g2 = std::make_shared<const Graph>(gen_erdos_renyi(12, 0.3, 2));
  const auto net = couple_random(g1, g2, LinkSpec::count(40), 3);
  save_layered(net, dir.path(), "pair");
  const auto loaded = load_layered(dir.path(), "pair");
  CHECK(loaded.layer1() == *g1);
  CHECK(loaded.layer2() == *g2);
  CHECK(std::equal(loaded.interlinks().begin(), loaded.interlinks().end(), net.interlinks().begin(),
                   net.interlinks().end()));
}
