#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_set>

#include "netspill/errors.hpp"
#include "netspill/graph.hpp"

namespace netspill {

std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population, std::uint64_t k, Rng& rng) {
  if (k > population) throw ParameterError("cannot draw " + std::to_string(k) + " of " + std::to_string(population));
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(k) * 2);
  for (std::uint64_t j = population - k; j < population; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::uint64_t pair_count(NodeId n) { return static_cast<std::uint64_t>(n) * (n - 1) / 2; }

// Index k of the unordered pair (u, v), u < v, is v(v-1)/2 + u.
Edge decode_pair(std::uint64_t k) {
  auto v = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (v * (v - 1) / 2 > k) --v;
  while ((v + 1) * v / 2 <= k) ++v;
  return {static_cast<NodeId>(k - v * (v - 1) / 2), static_cast<NodeId>(v)};
}

void require_nodes(NodeId n) {
  if (n < 1) throw ParameterError("graph needs at least one node");
}

Graph barabasi_albert(NodeId n, NodeId m_attach, Rng& rng) {
  require_nodes(n);
  if (m_attach < 1 || m_attach + 1 >= n) {
    throw ParameterError("m_attach must satisfy 1 <= m_attach and m_attach + 1 < n (got m_attach=" +
                         std::to_string(m_attach) + ", n=" + std::to_string(n) + ")");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m_attach) * (m_attach + 1) / 2 +
                static_cast<std::size_t>(n - m_attach - 1) * m_attach);
  // Each node appears once per incident edge, so a uniform pick is degree-proportional.
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * edges.capacity());
  for (NodeId v = 1; v <= m_attach; ++v) {
    for (NodeId u = 0; u < v; ++u) {
      edges.push_back({u, v});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  std::vector<NodeId> targets;
  for (NodeId t = m_attach + 1; t < n; ++t) {
    targets.clear();
    while (targets.size() < m_attach) {
      const NodeId c = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), c) == targets.end()) targets.push_back(c);
    }
    for (NodeId c : targets) {
      edges.push_back({c, t});
      endpoints.push_back(c);
      endpoints.push_back(t);
    }
  }
  return Graph::from_edges(n, edges);
}

}  // namespace

Graph gen_erdos_renyi(NodeId n, double p, Seed seed) {
  require_nodes(n);
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("edge probability must lie in [0, 1]");
  const std::uint64_t total = pair_count(n);
  std::vector<Edge> edges;
  if (p == 1.0) {
    edges.reserve(total);
    for (std::uint64_t k = 0; k < total; ++k) edges.push_back(decode_pair(k));
  } else if (p > 0.0) {
    Rng rng(seed);
    edges.reserve(static_cast<std::size_t>(p * static_cast<double>(total) * 1.1) + 16);
    // Skip sampling: the gap to the next present pair is geometric.
    for (std::uint64_t k = rng.geometric(p); k < total;) {
      edges.push_back(decode_pair(k));
      const std::uint64_t gap = rng.geometric(p);
      if (gap >= total - k) break;
      k += gap + 1;
    }
  }
  return Graph::from_edges(n, edges);
}

Graph gen_erdos_renyi_gnm(NodeId n, std::uint64_t m, Seed seed) {
  require_nodes(n);
  const std::uint64_t total = pair_count(n);
  if (m > total) {
    throw ParameterError("edge count " + std::to_string(m) + " exceeds the " + std::to_string(total) +
                         " possible pairs");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(m);
  if (m <= total / 2) {
    for (std::uint64_t k : sample_without_replacement(total, m, rng)) edges.push_back(decode_pair(k));
  } else {
    const auto excluded = sample_without_replacement(total, total - m, rng);
    auto it = excluded.begin();
    for (std::uint64_t k = 0; k < total; ++k) {
      if (it != excluded.end() && *it == k) {
        ++it;
        continue;
      }
      edges.push_back(decode_pair(k));
    }
  }
  return Graph::from_edges(n, edges);
}

Graph gen_watts_strogatz(NodeId n, NodeId k, double p_rewire, Seed seed) {
  require_nodes(n);
  if (k % 2 != 0) throw ParameterError("Watts-Strogatz mean degree k must be even");
  if (k >= n) throw ParameterError("Watts-Strogatz mean degree k must be smaller than n");
  if (!(p_rewire >= 0.0 && p_rewire <= 1.0)) throw ParameterError("rewiring probability must lie in [0, 1]");

  std::vector<std::set<NodeId>> adj(n);
  auto link = [&](NodeId a, NodeId b) {
    adj[a].insert(b);
    adj[b].insert(a);
  };
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId j = 1; j <= k / 2; ++j) link(u, (u + j) % n);
  }

  Rng rng(seed);
  for (NodeId j = 1; j <= k / 2; ++j) {
    for (NodeId u = 0; u < n; ++u) {
      if (!rng.bernoulli(p_rewire)) continue;
      // No free target: keep the lattice edge.
      if (adj[u].size() >= n - 1) continue;
      NodeId w;
      do {
        w = static_cast<NodeId>(rng.below(n));
      } while (w == u || adj[u].contains(w));
      const NodeId v = (u + j) % n;
      adj[u].erase(v);
      adj[v].erase(u);
      link(u, w);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * k / 2);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : adj[u]) {
      if (u < v) edges.push_back({u, v});
    }
  }
  return Graph::from_edges(n, edges);
}

Graph gen_barabasi_albert(NodeId n, NodeId m_attach, Seed seed) {
  Rng rng(seed);
  return barabasi_albert(n, m_attach, rng);
}

Graph gen_barabasi_albert_edges(NodeId n, NodeId m_attach, std::uint64_t target_edges, Seed seed) {
  Rng rng(seed);
  Graph full = barabasi_albert(n, m_attach, rng);
  if (target_edges > full.num_edges()) {
    throw ParameterError("target edge count " + std::to_string(target_edges) + " exceeds the " +
                         std::to_string(full.num_edges()) + " edges of the attachment graph");
  }
  const auto all = full.edges();
  const auto removed = sample_without_replacement(all.size(), all.size() - target_edges, rng);
  std::vector<Edge> kept;
  kept.reserve(target_edges);
  auto it = removed.begin();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (it != removed.end() && *it == i) {
      ++it;
      continue;
    }
    kept.push_back(all[i]);
  }
  return Graph::from_edges(n, kept);
}

}  // namespace netspill
