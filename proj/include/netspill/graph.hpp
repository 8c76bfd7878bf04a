#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "netspill/rng.hpp"

namespace netspill {

using NodeId = std::uint32_t;

/// Undirected edge, stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph on nodes 0..n-1 in compressed adjacency form.
/// Neighbor lists are sorted. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Empty graph on n isolated nodes.
  explicit Graph(NodeId n);

  /// Builds from an edge list. Either orientation is accepted; self-loops,
  /// duplicate edges and out-of-range endpoints throw ParameterError.
  static Graph from_edges(NodeId n, std::span<const Edge> edges);

  NodeId size() const noexcept { return static_cast<NodeId>(offsets_.empty() ? 0 : offsets_.size() - 1); }
  std::size_t num_edges() const noexcept { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const noexcept;
  double mean_degree() const noexcept;
  bool has_edge(NodeId u, NodeId v) const noexcept;

  /// All edges with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  /// y = A x for the adjacency matrix A.
  void multiply(std::span<const double> x, std::span<double> y) const noexcept;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
};

/// Inter-layer link between node u of layer 1 and node w of layer 2.
struct InterLink {
  NodeId u = 0;
  NodeId w = 0;
  friend auto operator<=>(const InterLink&, const InterLink&) = default;
};

/// Two contact layers and the bipartite link set joining them. The layer
/// graphs are shared, so many couplings of the same layers are cheap.
class LayeredNetwork {
 public:
  LayeredNetwork(std::shared_ptr<const Graph> layer1, std::shared_ptr<const Graph> layer2,
                 std::vector<InterLink> interlinks);
  LayeredNetwork(Graph layer1, Graph layer2, std::vector<InterLink> interlinks);

  const Graph& layer1() const noexcept { return *layer1_; }
  const Graph& layer2() const noexcept { return *layer2_; }
  const std::shared_ptr<const Graph>& layer1_ptr() const noexcept { return layer1_; }
  const std::shared_ptr<const Graph>& layer2_ptr() const noexcept { return layer2_; }

  NodeId n1() const noexcept { return layer1_->size(); }
  NodeId n2() const noexcept { return layer2_->size(); }

  /// Sorted, duplicate-free.
  std::span<const InterLink> interlinks() const noexcept { return interlinks_; }

  /// Row u of A12: layer-2 partners of layer-1 node u.
  std::span<const NodeId> partners_of_layer1(NodeId u) const noexcept {
    return {partners12_.data() + offsets12_[u], partners12_.data() + offsets12_[u + 1]};
  }
  /// Row w of A21 = A12^T: layer-1 partners of layer-2 node w.
  std::span<const NodeId> partners_of_layer2(NodeId w) const noexcept {
    return {partners21_.data() + offsets21_[w], partners21_.data() + offsets21_[w + 1]};
  }

  /// y = A12 x, x over layer 2, y over layer 1.
  void multiply_a12(std::span<const double> x, std::span<double> y) const noexcept;
  /// y = A21 x = A12^T x, x over layer 1, y over layer 2.
  void multiply_a21(std::span<const double> x, std::span<double> y) const noexcept;

 private:
  std::shared_ptr<const Graph> layer1_;
  std::shared_ptr<const Graph> layer2_;
  std::vector<InterLink> interlinks_;
  std::vector<std::size_t> offsets12_, offsets21_;
  std::vector<NodeId> partners12_, partners21_;
};

/// How many inter-layer pairs to activate.
class LinkSpec {
 public:
  enum class Mode { probability, count, fraction };

  static LinkSpec probability(double omega);
  static LinkSpec count(std::uint64_t m);
  static LinkSpec fraction(double f);

  Mode mode() const noexcept { return mode_; }
  double value() const noexcept { return value_; }

  /// Exact link count for count/fraction modes; fraction uses round-half-up
  /// of f * n1 * n2. Throws ParameterError if the count exceeds n1 * n2.
  std::uint64_t resolve_count(std::uint64_t n1, std::uint64_t n2) const;

 private:
  LinkSpec(Mode mode, double value) : mode_(mode), value_(value) {}
  Mode mode_;
  double value_;
};

// ---- generators -----------------------------------------------------------

/// Gilbert G(n, p).
Graph gen_erdos_renyi(NodeId n, double p, Seed seed);

/// Uniform G(n, m): exactly m distinct edges.
Graph gen_erdos_renyi_gnm(NodeId n, std::uint64_t m, Seed seed);

/// Ring lattice with k/2 neighbours per side, each lattice edge's far end
/// rewired with probability p_rewire. Edge count is always n*k/2.
Graph gen_watts_strogatz(NodeId n, NodeId k, double p_rewire, Seed seed);

/// Preferential attachment from a clique of m_attach+1 nodes.
Graph gen_barabasi_albert(NodeId n, NodeId m_attach, Seed seed);

/// Barabasi-Albert followed by uniform deletion of surplus edges down to
/// target_edges. Used to match instance sizes that no integer m_attach gives.
Graph gen_barabasi_albert_edges(NodeId n, NodeId m_attach, std::uint64_t target_edges, Seed seed);

// ---- coupling -------------------------------------------------------------

LayeredNetwork couple_random(std::shared_ptr<const Graph> g1, std::shared_ptr<const Graph> g2,
                             const LinkSpec& spec, Seed seed);

/// Layer-2 hubs: the num_hubs highest-degree nodes, ties to lower index.
std::vector<NodeId> select_hubs(const Graph& g, NodeId num_hubs);

/// Links per hub when `count` links are spread over num_hubs hubs; the
/// remainder goes to the highest-degree hubs first.
std::vector<std::uint64_t> hub_link_counts(std::uint64_t count, NodeId num_hubs);

/// Links `count` layer-1 nodes to the hubs of layer 2, partners drawn
/// uniformly without replacement per hub.
LayeredNetwork couple_to_hubs(std::shared_ptr<const Graph> g1, std::shared_ptr<const Graph> g2,
                              std::uint64_t count, NodeId num_hubs, Seed seed);

/// Inter-links for a coupling without building the network.
std::vector<InterLink> draw_random_links(NodeId n1, NodeId n2, const LinkSpec& spec, Seed seed);
std::vector<InterLink> draw_hub_links(NodeId n1, const Graph& g2, std::uint64_t count, NodeId num_hubs,
                                      Seed seed);
/// Same, for hubs already ranked by select_hubs.
std::vector<InterLink> draw_hub_links(NodeId n1, std::span<const NodeId> hubs, std::uint64_t count, Seed seed);

/// k distinct values from [0, population), sorted. Floyd's algorithm.
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population, std::uint64_t k, Rng& rng);

// ---- edge-list files ------------------------------------------------------

/// Whitespace separated "u v" per line, 0-indexed, optional "# n=<count>"
/// header. Without a header the node count is max index + 1.
Graph load_graph(const std::filesystem::path& path);
void save_graph(const Graph& g, const std::filesystem::path& path);

/// "u w" per line (layer-1 node u, layer-2 node w), optional
/// "# n1=<count> n2=<count>" header.
std::vector<InterLink> load_interlinks(const std::filesystem::path& path, NodeId n1, NodeId n2);
void save_interlinks(const LayeredNetwork& net, const std::filesystem::path& path);

/// Writes <stem>_layer1.edges, <stem>_layer2.edges and <stem>_interlinks.edges.
void save_layered(const LayeredNetwork& net, const std::filesystem::path& dir, const std::string& stem);
LayeredNetwork load_layered(const std::filesystem::path& dir, const std::string& stem);

}  // namespace netspill
