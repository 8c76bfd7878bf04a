#include "netspill/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netspill/errors.hpp"

namespace netspill {

Graph::Graph(NodeId n) : offsets_(static_cast<std::size_t>(n) + 1, 0) {}

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges) {
  std::vector<Edge> sorted;
  sorted.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw ParameterError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                           ") out of range for " + std::to_string(n) + " nodes");
    }
    if (e.u == e.v) throw ParameterError("self-loop at node " + std::to_string(e.u));
    sorted.push_back(e.u < e.v ? e : Edge{e.v, e.u});
  }
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
    throw ParameterError("duplicate edge (" + std::to_string(dup->u) + ", " + std::to_string(dup->v) + ")");
  }

  Graph g(n);
  for (const Edge& e : sorted) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
  g.adjacency_.resize(2 * sorted.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : sorted) {
    g.adjacency_[cursor[e.u]++] = e.v;
    g.adjacency_[cursor[e.v]++] = e.u;
  }
  // Sorted edge order fills every row in increasing neighbour order.
  return g;
}

std::size_t Graph::max_degree() const noexcept {
  std::size_t best = 0;
  for (NodeId v = 0; v < size(); ++v) best = std::max(best, degree(v));
  return best;
}

double Graph::mean_degree() const noexcept {
  return size() == 0 ? 0.0 : static_cast<double>(adjacency_.size()) / size();
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
  if (u >= size() || v >= size()) return false;
  auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < size(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

void Graph::multiply(std::span<const double> x, std::span<double> y) const noexcept {
  for (NodeId v = 0; v < size(); ++v) {
    double acc = 0.0;
    for (NodeId z : neighbors(v)) acc += x[z];
    y[v] = acc;
  }
}

// ---------------------------------------------------------------------------

namespace {

void build_rows(std::size_t rows, std::span<const InterLink> links, bool by_u, std::vector<std::size_t>& offsets,
                std::vector<NodeId>& cols) {
  offsets.assign(rows + 1, 0);
  for (const InterLink& l : links) ++offsets[(by_u ? l.u : l.w) + 1];
  for (std::size_t i = 1; i <= rows; ++i) offsets[i] += offsets[i - 1];
  cols.resize(links.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  // links are sorted by (u, w), so every row comes out sorted.
  for (const InterLink& l : links) {
    if (by_u) {
      cols[cursor[l.u]++] = l.w;
    } else {
      cols[cursor[l.w]++] = l.u;
    }
  }
}

}  // namespace

LayeredNetwork::LayeredNetwork(std::shared_ptr<const Graph> layer1, std::shared_ptr<const Graph> layer2,
                               std::vector<InterLink> interlinks)
    : layer1_(std::move(layer1)), layer2_(std::move(layer2)), interlinks_(std::move(interlinks)) {
  if (!layer1_ || !layer2_) throw ParameterError("layered network needs two layer graphs");
  for (const InterLink& l : interlinks_) {
    if (l.u >= n1() || l.w >= n2()) {
      throw ParameterError("inter-link (" + std::to_string(l.u) + ", " + std::to_string(l.w) + ") out of range");
    }
  }
  std::sort(interlinks_.begin(), interlinks_.end());
  if (auto dup = std::adjacent_find(interlinks_.begin(), interlinks_.end()); dup != interlinks_.end()) {
    throw ParameterError("duplicate inter-link (" + std::to_string(dup->u) + ", " + std::to_string(dup->w) + ")");
  }
  build_rows(n1(), interlinks_, true, offsets12_, partners12_);
  build_rows(n2(), interlinks_, false, offsets21_, partners21_);
}

LayeredNetwork::LayeredNetwork(Graph layer1, Graph layer2, std::vector<InterLink> interlinks)
    : LayeredNetwork(std::make_shared<const Graph>(std::move(layer1)),
                     std::make_shared<const Graph>(std::move(layer2)), std::move(interlinks)) {}

void LayeredNetwork::multiply_a12(std::span<const double> x, std::span<double> y) const noexcept {
  for (NodeId u = 0; u < n1(); ++u) {
    double acc = 0.0;
    for (NodeId w : partners_of_layer1(u)) acc += x[w];
    y[u] = acc;
  }
}

void LayeredNetwork::multiply_a21(std::span<const double> x, std::span<double> y) const noexcept {
  for (NodeId w = 0; w < n2(); ++w) {
    double acc = 0.0;
    for (NodeId u : partners_of_layer2(w)) acc += x[u];
    y[w] = acc;
  }
}

// ---------------------------------------------------------------------------

LinkSpec LinkSpec::probability(double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw ParameterError("link probability must lie in [0, 1]");
  return {Mode::probability, omega};
}

LinkSpec LinkSpec::count(std::uint64_t m) { return {Mode::count, static_cast<double>(m)}; }

LinkSpec LinkSpec::fraction(double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw ParameterError("link fraction must lie in [0, 1]");
  return {Mode::fraction, f};
}

std::uint64_t LinkSpec::resolve_count(std::uint64_t n1, std::uint64_t n2) const {
  const std::uint64_t capacity = n1 * n2;
  std::uint64_t m = 0;
  switch (mode_) {
    case Mode::count:
      m = static_cast<std::uint64_t>(value_);
      break;
    case Mode::fraction:
      m = static_cast<std::uint64_t>(std::floor(value_ * static_cast<double>(capacity) + 0.5));
      break;
    case Mode::probability:
      throw ParameterError("probability link spec has no fixed count");
  }
  if (m > capacity) {
    throw ParameterError("link count " + std::to_string(m) + " exceeds the " + std::to_string(capacity) +
                         " possible inter-layer pairs");
  }
  return m;
}

}  // namespace netspill
