#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "netspill/errors.hpp"
#include "netspill/graph.hpp"

namespace netspill {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<std::uint64_t> parse_uint(std::string_view token) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

// Value of "key=<uint>" inside a header comment, if present.
std::optional<std::uint64_t> header_value(std::string_view line, std::string_view key, std::size_t line_no) {
  std::string needle(key);
  needle += '=';
  auto pos = line.find(needle);
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = line.substr(pos + needle.size());
  auto stop = rest.find_first_of(" \t");
  auto value = parse_uint(rest.substr(0, stop));
  if (!value) throw FormatError("malformed header value for '" + std::string(key) + "'", line_no);
  return value;
}

struct PairLine {
  std::uint64_t a, b;
  std::size_t line;
};

// Reads "a b" lines; header comments are passed to on_header.
template <class OnHeader>
std::vector<PairLine> read_pairs(std::istream& in, OnHeader&& on_header) {
  std::vector<PairLine> pairs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      on_header(line, line_no);
      continue;
    }
    std::istringstream fields{std::string(line)};
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw FormatError("expected two node indices", line_no);
    }
    auto ia = parse_uint(a);
    auto ib = parse_uint(b);
    if (!ia || !ib) throw FormatError("node indices must be non-negative integers", line_no);
    pairs.push_back({*ia, *ib, line_no});
  }
  return pairs;
}

}  // namespace

Graph load_graph(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::optional<std::uint64_t> declared;
  auto pairs = read_pairs(in, [&](std::string_view line, std::size_t line_no) {
    if (auto n = header_value(line, "n", line_no)) declared = n;
  });

  std::uint64_t n = 0;
  if (declared) {
    n = *declared;
  } else {
    for (const auto& p : pairs) n = std::max({n, p.a + 1, p.b + 1});
  }
  if (n > UINT32_MAX) throw FormatError("node count too large", 1);

  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  std::vector<std::pair<Edge, std::size_t>> keyed;
  keyed.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.a >= n || p.b >= n) {
      throw FormatError("node index out of range for " + std::to_string(n) + " nodes", p.line);
    }
    if (p.a == p.b) throw FormatError("self-loop at node " + std::to_string(p.a), p.line);
    const auto u = static_cast<NodeId>(std::min(p.a, p.b));
    const auto v = static_cast<NodeId>(std::max(p.a, p.b));
    keyed.push_back({{u, v}, p.line});
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 1; i < keyed.size(); ++i) {
    if (keyed[i].first == keyed[i - 1].first) throw FormatError("duplicate edge", keyed[i].second);
  }
  for (const auto& [e, line] : keyed) edges.push_back(e);
  return Graph::from_edges(static_cast<NodeId>(n), edges);
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "# n=" << g.size() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<InterLink> load_interlinks(const std::filesystem::path& path, NodeId n1, NodeId n2) {
  auto in = open_in(path);
  std::optional<std::uint64_t> d1, d2;
  std::size_t header_line = 0;
  auto pairs = read_pairs(in, [&](std::string_view line, std::size_t line_no) {
    if (auto v = header_value(line, "n1", line_no)) d1 = v, header_line = line_no;
    if (auto v = header_value(line, "n2", line_no)) d2 = v, header_line = line_no;
  });
  if ((d1 && *d1 != n1) || (d2 && *d2 != n2)) {
    throw FormatError("header sizes do not match the layer graphs", header_line);
  }
  std::vector<std::pair<InterLink, std::size_t>> keyed;
  keyed.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.a >= n1 || p.b >= n2) throw FormatError("inter-link endpoint out of range", p.line);
    keyed.push_back({{static_cast<NodeId>(p.a), static_cast<NodeId>(p.b)}, p.line});
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 1; i < keyed.size(); ++i) {
    if (keyed[i].first == keyed[i - 1].first) throw FormatError("duplicate inter-link", keyed[i].second);
  }
  std::vector<InterLink> links;
  links.reserve(keyed.size());
  for (const auto& [l, line] : keyed) links.push_back(l);
  return links;
}

void save_interlinks(const LayeredNetwork& net, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "# n1=" << net.n1() << " n2=" << net.n2() << '\n';
  for (const InterLink& l : net.interlinks()) out << l.u << ' ' << l.w << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void save_layered(const LayeredNetwork& net, const std::filesystem::path& dir, const std::string& stem) {
  save_graph(net.layer1(), dir / (stem + "_layer1.edges"));
  save_graph(net.layer2(), dir / (stem + "_layer2.edges"));
  save_interlinks(net, dir / (stem + "_interlinks.edges"));
}

LayeredNetwork load_layered(const std::filesystem::path& dir, const std::string& stem) {
  auto g1 = load_graph(dir / (stem + "_layer1.edges"));
  auto g2 = load_graph(dir / (stem + "_layer2.edges"));
  auto links = load_interlinks(dir / (stem + "_interlinks.edges"), g1.size(), g2.size());
  return {std::move(g1), std::move(g2), std::move(links)};
}

}  // namespace netspill
