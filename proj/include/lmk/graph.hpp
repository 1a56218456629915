#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lmk {

using NodeId = std::uint32_t;
using Dist = std::uint32_t;

inline constexpr Dist kUnreached = std::numeric_limits<Dist>::max();
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

using Edge = std::pair<NodeId, NodeId>;

struct EdgeStats {
  std::uint64_t self_loops = 0;
  std::uint64_t duplicates = 0;
};

/// Immutable undirected unweighted graph in compressed adjacency form.
///
/// Canonical form: no self-loops, no duplicate edges, every neighbor list
/// sorted ascending. Two graphs with the same edge set compare equal and
/// serialize to identical bytes.
class Graph {
 public:
  Graph() = default;

  /// Builds the canonical graph on nodes [0, n) from an arbitrary edge list.
  /// Self-loops and repeated edges (in either orientation) are dropped and,
  /// when `stats` is given, counted there.
  static Graph from_edges(NodeId n, std::span<const Edge> edges, EdgeStats* stats = nullptr);

  /// Adopts an existing compressed adjacency after validating canonical form.
  /// Throws FormatError on any violation.
  static Graph from_csr(std::vector<std::uint64_t> offsets, std::vector<NodeId> adjacency);

  NodeId num_nodes() const noexcept { return offsets_.empty() ? 0 : static_cast<NodeId>(offsets_.size() - 1); }
  std::uint64_t num_edges() const noexcept { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId u) const noexcept {
    return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
  }
  std::uint64_t degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }

  std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> adjacency() const noexcept { return adjacency_; }

  /// Edges as (u, v) with u < v, in ascending order.
  std::vector<Edge> edge_list() const;

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::uint64_t> offsets_{0};
  std::vector<NodeId> adjacency_;
};

// ---------------------------------------------------------------------------
// Generation

/// Erdős–Rényi G(n, λ/n). Each of the C(n,2) slots is enumerated in row-major
/// lower-triangle order and skipped over with geometric gaps, so the expected
/// cost is O(n + m). Deterministic in (n, lambda, seed).
Graph er_generate(NodeId n, double lambda, std::uint64_t seed);

Graph path_graph(NodeId n);
Graph star_graph(NodeId n);
Graph complete_graph(NodeId n);

// ---------------------------------------------------------------------------
// Traversal

std::vector<Dist> bfs(const Graph& g, NodeId source);

struct MultiSourceResult {
  std::vector<Dist> dist;
  std::vector<NodeId> closest;  // kNoNode where dist is kUnreached
};

/// One frontier pass from all sources at once. `closest[u]` is the source
/// achieving dist[u]; among equally close sources the smallest node id wins.
MultiSourceResult multi_source_bfs(const Graph& g, std::span<const NodeId> sources);

struct ComponentLabeling {
  // Component ids are ranks: 0 is the largest component. Equal sizes are
  // ordered by their smallest member id.
  std::vector<std::uint32_t> label;
  std::vector<std::uint64_t> sizes;  // sorted descending

  std::uint64_t largest() const noexcept { return sizes.empty() ? 0 : sizes.front(); }
};

ComponentLabeling components(const Graph& g);

/// Induced subgraph on nodes where keep[u] is nonzero, ids remapped densely in
/// ascending order. `old_ids`, when given, receives the original id of each
/// new node.
Graph induced_subgraph(const Graph& g, std::span<const std::uint8_t> keep, std::vector<NodeId>* old_ids = nullptr);

/// Largest connected component (ties: the one holding the smallest node id).
Graph extract_lcc(const Graph& g, std::vector<NodeId>* old_ids = nullptr);

// ---------------------------------------------------------------------------
// I/O

struct IngestResult {
  Graph graph;
  std::vector<std::int64_t> labels;  // labels[new id] = original label
  EdgeStats dropped;
};

/// Parses a whitespace-separated edge list. Lines whose first non-blank
/// character is '#' and blank lines are ignored. Labels are remapped to
/// 0..n-1 in ascending label order. A self-loop still registers its node.
IngestResult ingest_edgelist(std::istream& in);

/// Writes "u v" per edge (u < v). Isolated nodes are written as "u u" so that
/// ingest_edgelist reproduces the exact node set.
void write_edgelist(const Graph& g, std::ostream& out);

/// Binary canonical form: "LMGR", u16 version, u64 n, (n+1) u64 offsets,
/// 2m u64 neighbors, all little-endian.
void write_graph_binary(const Graph& g, std::ostream& out);
Graph read_graph_binary(std::istream& in);

inline constexpr std::uint16_t kGraphFormatVersion = 1;

/// Reads a graph file: LMGR binary if it starts with the magic bytes,
/// otherwise an edge list.
Graph load_graph(const std::string& path);

}  // namespace lmk
