#include <algorithm>
#include <numeric>
#include <string>

#include "netspill/errors.hpp"
#include "netspill/graph.hpp"

namespace netspill {

std::vector<InterLink> draw_random_links(NodeId n1, NodeId n2, const LinkSpec& spec, Seed seed) {
  const std::uint64_t capacity = static_cast<std::uint64_t>(n1) * n2;
  std::vector<InterLink> links;
  auto decode = [n2](std::uint64_t k) {
    return InterLink{static_cast<NodeId>(k / n2), static_cast<NodeId>(k % n2)};
  };
  Rng rng(seed);
  if (spec.mode() == LinkSpec::Mode::probability) {
    const double omega = spec.value();
    if (omega == 1.0) {
      links.reserve(capacity);
      for (std::uint64_t k = 0; k < capacity; ++k) links.push_back(decode(k));
    } else if (omega > 0.0) {
      links.reserve(static_cast<std::size_t>(omega * static_cast<double>(capacity) * 1.1) + 16);
      for (std::uint64_t k = rng.geometric(omega); k < capacity;) {
        links.push_back(decode(k));
        const std::uint64_t gap = rng.geometric(omega);
        if (gap >= capacity - k) break;
        k += gap + 1;
      }
    }
    return links;
  }
  const std::uint64_t m = spec.resolve_count(n1, n2);
  links.reserve(m);
  for (std::uint64_t k : sample_without_replacement(capacity, m, rng)) links.push_back(decode(k));
  return links;
}

LayeredNetwork couple_random(std::shared_ptr<const Graph> g1, std::shared_ptr<const Graph> g2,
                             const LinkSpec& spec, Seed seed) {
  auto links = draw_random_links(g1->size(), g2->size(), spec, seed);
  return {std::move(g1), std::move(g2), std::move(links)};
}

std::vector<NodeId> select_hubs(const Graph& g, NodeId num_hubs) {
  if (num_hubs > g.size()) {
    throw ParameterError("cannot select " + std::to_string(num_hubs) + " hubs from " + std::to_string(g.size()) +
                         " nodes");
  }
  std::vector<NodeId> order(g.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&g](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
  order.resize(num_hubs);
  return order;
}

std::vector<std::uint64_t> hub_link_counts(std::uint64_t count, NodeId num_hubs) {
  if (num_hubs == 0) {
    if (count > 0) throw ParameterError("links requested but no hubs");
    return {};
  }
  std::vector<std::uint64_t> counts(num_hubs, count / num_hubs);
  for (std::uint64_t i = 0; i < count % num_hubs; ++i) ++counts[i];
  return counts;
}

std::vector<InterLink> draw_hub_links(NodeId n1, std::span<const NodeId> hubs, std::uint64_t count, Seed seed) {
  const auto num_hubs = static_cast<NodeId>(hubs.size());
  if (count > static_cast<std::uint64_t>(num_hubs) * n1) {
    throw ParameterError("link count " + std::to_string(count) + " exceeds hub capacity " +
                         std::to_string(static_cast<std::uint64_t>(num_hubs) * n1));
  }
  const auto counts = hub_link_counts(count, num_hubs);
  Rng rng(seed);
  std::vector<InterLink> links;
  links.reserve(count);
  for (std::size_t h = 0; h < hubs.size(); ++h) {
    for (std::uint64_t u : sample_without_replacement(n1, counts[h], rng)) {
      links.push_back({static_cast<NodeId>(u), hubs[h]});
    }
  }
  return links;
}

std::vector<InterLink> draw_hub_links(NodeId n1, const Graph& g2, std::uint64_t count, NodeId num_hubs,
                                      Seed seed) {
  const auto hubs = select_hubs(g2, num_hubs);
  return draw_hub_links(n1, hubs, count, seed);
}

LayeredNetwork couple_to_hubs(std::shared_ptr<const Graph> g1, std::shared_ptr<const Graph> g2,
                              std::uint64_t count, NodeId num_hubs, Seed seed) {
  auto links = draw_hub_links(g1->size(), *g2, count, num_hubs, seed);
  return {std::move(g1), std::move(g2), std::move(links)};
}

}  // namespace netspill
