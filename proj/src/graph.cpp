#include "lmk/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "binary_io.hpp"
#include "lmk/error.hpp"
#include "lmk/rng.hpp"

namespace lmk {

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges, EdgeStats* stats) {
  if (n == kNoNode) throw ParameterError("node count too large");
  EdgeStats local;
  std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw ParameterError("edge endpoint out of range");
    if (u == v) {
      ++local.self_loops;
      continue;
    }
    ++offsets[u + 1];
    ++offsets[v + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());

  std::vector<NodeId> adjacency(offsets.back());
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    adjacency[cursor[u]++] = v;
    adjacency[cursor[v]++] = u;
  }

  // Sort and dedup each list in place, then compact.
  std::uint64_t write = 0;
  std::uint64_t removed = 0;
  std::uint64_t begin = 0;
  for (NodeId u = 0; u < n; ++u) {
    const std::uint64_t end = offsets[u + 1];
    auto first = adjacency.begin() + static_cast<std::ptrdiff_t>(begin);
    auto last = adjacency.begin() + static_cast<std::ptrdiff_t>(end);
    std::sort(first, last);
    auto unique_end = std::unique(first, last);
    const auto kept = static_cast<std::uint64_t>(unique_end - first);
    removed += (end - begin) - kept;
    std::move(first, unique_end, adjacency.begin() + static_cast<std::ptrdiff_t>(write));
    offsets[u] = write;
    write += kept;
    begin = end;
  }
  offsets[n] = write;
  adjacency.resize(write);
  adjacency.shrink_to_fit();
  local.duplicates = removed / 2;
  if (stats) *stats = local;

  Graph g;
  g.offsets_ = std::move(offsets);
  g.adjacency_ = std::move(adjacency);
  return g;
}

Graph Graph::from_csr(std::vector<std::uint64_t> offsets, std::vector<NodeId> adjacency) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != adjacency.size())
    throw FormatError("graph: offsets do not span the neighbor array");
  if (offsets.size() - 1 >= kNoNode) throw FormatError("graph: node count too large");
  const auto n = static_cast<NodeId>(offsets.size() - 1);
  for (NodeId u = 0; u < n; ++u) {
    if (offsets[u] > offsets[u + 1]) throw FormatError("graph: offsets not monotone");
    for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
      const NodeId v = adjacency[i];
      if (v >= n) throw FormatError("graph: neighbor id out of range");
      if (v == u) throw FormatError("graph: self-loop");
      if (i > offsets[u] && adjacency[i - 1] >= v) throw FormatError("graph: neighbor list not strictly ascending");
    }
  }
  for (NodeId u = 0; u < n; ++u) {
    for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
      const NodeId v = adjacency[i];
      auto first = adjacency.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
      auto last = adjacency.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]);
      if (!std::binary_search(first, last, u)) throw FormatError("graph: adjacency not symmetric");
    }
  }
  Graph g;
  g.offsets_ = std::move(offsets);
  g.adjacency_ = std::move(adjacency);
  return g;
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

// ---------------------------------------------------------------------------

Graph er_generate(NodeId n, double lambda, std::uint64_t seed) {
  if (n == 0) throw ParameterError("er_generate: n must be positive");
  if (!(lambda >= 0.0) || lambda > static_cast<double>(n)) throw ParameterError("er_generate: lambda must lie in [0, n]");
  const double p = lambda / static_cast<double>(n);
  std::vector<Edge> edges;
  if (p <= 0.0 || n < 2) return Graph::from_edges(n, edges);
  edges.reserve(static_cast<std::size_t>(lambda * n / 2.0 * 1.05) + 16);

  if (p >= 1.0) {
    for (NodeId v = 1; v < n; ++v)
      for (NodeId w = 0; w < v; ++w) edges.emplace_back(v, w);
    return Graph::from_edges(n, edges);
  }

  // Lower triangle, row v = 1..n-1, column w = 0..v-1.
  Rng rng = make_rng(seed, "er");
  const double log_q = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double gap = std::floor(std::log(1.0 - uniform01(rng)) / log_q);
    // A gap larger than every remaining slot ends the scan.
    if (gap >= static_cast<double>(nn) * static_cast<double>(nn)) break;
    w += 1 + static_cast<std::int64_t>(gap);
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>(w));
  }
  return Graph::from_edges(n, edges);
}

Graph path_graph(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId u = 1; u < n; ++u) edges.emplace_back(u - 1, u);
  return Graph::from_edges(n, edges);
}

Graph star_graph(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId u = 1; u < n; ++u) edges.emplace_back(0, u);
  return Graph::from_edges(n, edges);
}

Graph complete_graph(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v)
    for (NodeId w = 0; w < v; ++w) edges.emplace_back(w, v);
  return Graph::from_edges(n, edges);
}

// ---------------------------------------------------------------------------

std::vector<Dist> bfs(const Graph& g, NodeId source) {
  const NodeId n = g.num_nodes();
  if (source >= n) throw ParameterError("bfs: source out of range");
  std::vector<Dist> dist(n, kUnreached);
  std::vector<NodeId> queue;
  queue.reserve(n);
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    const Dist next = dist[u] + 1;
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] == kUnreached) {
        dist[v] = next;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

MultiSourceResult multi_source_bfs(const Graph& g, std::span<const NodeId> sources) {
  const NodeId n = g.num_nodes();
  if (sources.empty()) throw ParameterError("multi_source_bfs: empty source set");
  MultiSourceResult res{std::vector<Dist>(n, kUnreached), std::vector<NodeId>(n, kNoNode)};
  auto& dist = res.dist;
  auto& closest = res.closest;
  std::vector<NodeId> queue;
  queue.reserve(n);
  for (NodeId s : sources) {
    if (s >= n) throw ParameterError("multi_source_bfs: source out of range");
    if (dist[s] == 0) continue;
    dist[s] = 0;
    closest[s] = s;
    queue.push_back(s);
  }
  // Level-synchronous: a node's label is the min over all parents one level
  // up. Labels of level k are final before level k+1 is expanded.
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    const Dist next = dist[u] + 1;
    const NodeId label = closest[u];
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] == kUnreached) {
        dist[v] = next;
        closest[v] = label;
        queue.push_back(v);
      } else if (dist[v] == next && label < closest[v]) {
        closest[v] = label;
      }
    }
  }
  return res;
}

ComponentLabeling components(const Graph& g) {
  const NodeId n = g.num_nodes();
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> raw(n, kUnset);
  std::vector<std::uint64_t> raw_sizes;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (raw[s] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(raw_sizes.size());
    std::uint64_t size = 0;
    raw[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId v : g.neighbors(u)) {
        if (raw[v] == kUnset) {
          raw[v] = id;
          stack.push_back(v);
        }
      }
    }
    raw_sizes.push_back(size);
  }
  // Raw ids follow smallest-member order already; a stable sort by size keeps
  // that as the tie-break.
  std::vector<std::uint32_t> order(raw_sizes.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return raw_sizes[a] > raw_sizes[b]; });
  std::vector<std::uint32_t> rank(order.size());
  ComponentLabeling out;
  out.sizes.reserve(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = i;
    out.sizes.push_back(raw_sizes[order[i]]);
  }
  out.label.resize(n);
  for (NodeId u = 0; u < n; ++u) out.label[u] = rank[raw[u]];
  return out;
}

Graph induced_subgraph(const Graph& g, std::span<const std::uint8_t> keep, std::vector<NodeId>* old_ids) {
  const NodeId n = g.num_nodes();
  if (keep.size() != n) throw ParameterError("induced_subgraph: mask size mismatch");
  std::vector<NodeId> remap(n, kNoNode);
  std::vector<NodeId> back;
  for (NodeId u = 0; u < n; ++u) {
    if (keep[u]) {
      remap[u] = static_cast<NodeId>(back.size());
      back.push_back(u);
    }
  }
  // Remapping is monotone, so sorted neighbor lists stay sorted.
  std::vector<std::uint64_t> offsets{0};
  offsets.reserve(back.size() + 1);
  std::vector<NodeId> adjacency;
  for (NodeId u : back) {
    for (NodeId v : g.neighbors(u))
      if (remap[v] != kNoNode) adjacency.push_back(remap[v]);
    offsets.push_back(adjacency.size());
  }
  if (old_ids) *old_ids = std::move(back);
  return Graph::from_csr(std::move(offsets), std::move(adjacency));
}

Graph extract_lcc(const Graph& g, std::vector<NodeId>* old_ids) {
  if (g.num_nodes() == 0) throw ParameterError("extract_lcc: empty graph");
  const auto comp = components(g);
  std::vector<std::uint8_t> keep(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) keep[u] = comp.label[u] == 0;
  return induced_subgraph(g, keep, old_ids);
}

// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_label(std::string_view& rest, std::int64_t& out) {
  const auto start = rest.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) return false;
  rest.remove_prefix(start);
  const char* begin = rest.data();
  const char* end = rest.data() + rest.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || (ptr != end && *ptr != ' ' && *ptr != '\t' && *ptr != '\r')) return false;
  rest.remove_prefix(static_cast<std::size_t>(ptr - begin));
  return true;
}

}  // namespace

IngestResult ingest_edgelist(std::istream& in) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::int64_t a = 0;
    std::int64_t b = 0;
    if (!parse_label(view, a) || !parse_label(view, b) || !trim(view).empty())
      throw ParseError(line_no, "expected two integer node labels");
    raw.emplace_back(a, b);
  }
  if (in.bad()) throw IoError("edge list read failed");

  std::vector<std::int64_t> labels;
  labels.reserve(raw.size() * 2);
  for (const auto& [a, b] : raw) {
    labels.push_back(a);
    labels.push_back(b);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.size() >= kNoNode) throw ParameterError("ingest: too many nodes");

  auto id_of = [&](std::int64_t label) {
    return static_cast<NodeId>(std::lower_bound(labels.begin(), labels.end(), label) - labels.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [a, b] : raw) edges.emplace_back(id_of(a), id_of(b));

  IngestResult result;
  result.graph = Graph::from_edges(static_cast<NodeId>(labels.size()), edges, &result.dropped);
  result.labels = std::move(labels);
  return result;
}

void write_edgelist(const Graph& g, std::ostream& out) {
  std::string buf;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (g.degree(u) == 0) {
      buf += std::to_string(u) + ' ' + std::to_string(u) + '\n';
      continue;
    }
    for (NodeId v : g.neighbors(u)) {
      if (u < v) buf += std::to_string(u) + ' ' + std::to_string(v) + '\n';
    }
  }
  detail::write_all(out, buf);
}

void write_graph_binary(const Graph& g, std::ostream& out) {
  std::string buf = "LMGR";
  detail::put_le<std::uint16_t>(buf, kGraphFormatVersion);
  detail::put_le<std::uint64_t>(buf, g.num_nodes());
  for (std::uint64_t off : g.offsets()) detail::put_le<std::uint64_t>(buf, off);
  for (NodeId v : g.adjacency()) detail::put_le<std::uint64_t>(buf, v);
  detail::write_all(out, buf);
}

Graph read_graph_binary(std::istream& in) {
  const std::string data = detail::slurp(in);
  detail::ByteReader rd(data, "graph");
  rd.expect_magic("LMGR");
  if (rd.get_le<std::uint16_t>() != kGraphFormatVersion) throw FormatError("graph: unsupported version");
  const auto n = rd.get_le<std::uint64_t>();
  if (n >= kNoNode) throw FormatError("graph: node count too large");
  rd.require((n + 1) * 8);
  std::vector<std::uint64_t> offsets(n + 1);
  for (auto& off : offsets) off = rd.get_le<std::uint64_t>();
  const std::uint64_t entries = offsets.back();
  if (entries % 2 != 0 || rd.remaining() != entries * 8) throw FormatError("graph: neighbor block size mismatch");
  std::vector<NodeId> adjacency(entries);
  for (auto& v : adjacency) {
    const auto raw = rd.get_le<std::uint64_t>();
    if (raw >= n) throw FormatError("graph: neighbor id out of range");
    v = static_cast<NodeId>(raw);
  }
  return Graph::from_csr(std::move(offsets), std::move(adjacency));
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  in.clear();
  in.seekg(0);
  if (std::string_view(magic, 4) == "LMGR") return read_graph_binary(in);
  return ingest_edgelist(in).graph;
}

}  // namespace lmk
