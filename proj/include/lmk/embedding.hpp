#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lmk/graph.hpp"

namespace lmk {

/// R rounds of r+1 landmark sets each; set i of a round holds M^i draws.
/// sets are stored round-major: index = round * (r + 1) + i.
struct LandmarkFamily {
  std::uint32_t M = 2;
  std::uint32_t r = 0;
  std::uint32_t R = 0;
  std::uint64_t seed = 0;
  NodeId n = 0;
  std::vector<std::vector<NodeId>> sets;  // as sampled, duplicates kept

  std::size_t dims() const noexcept { return static_cast<std::size_t>(R) * (r + 1); }
  std::span<const NodeId> set(std::uint32_t round, std::uint32_t i) const { return sets.at(round * (r + 1) + i); }

  // True when M^r exceeds n, i.e. the largest sets are bigger than V.
  bool oversized() const noexcept;

  bool operator==(const LandmarkFamily&) const = default;
};

/// Draws every set uniformly with replacement from [0, n). Sampling order is
/// round-major, then size-ascending, from a single stream, so the family for
/// R rounds is a prefix of the family for any R' > R with the same seed.
LandmarkFamily sample_family(NodeId n, std::uint32_t M, std::uint32_t r, std::uint32_t R, std::uint64_t seed);

void write_family(const LandmarkFamily& fam, std::ostream& out);
LandmarkFamily read_family(std::istream& in);

enum class Builder : std::uint8_t { bfs = 0, gnn = 1 };

const char* builder_name(Builder b) noexcept;

/// Per-node coordinates. x is row-major n x D; +inf marks an unreached
/// coordinate. sigma is present for the "bfs" builder only and holds the
/// global id of the closest landmark (kNoNode where undefined).
struct Embedding {
  std::uint64_t n = 0;
  std::uint16_t M = 2;
  std::uint16_t r = 0;
  std::uint32_t R = 0;
  std::uint64_t seed = 0;
  Builder builder = Builder::bfs;
  std::vector<double> x;
  std::vector<NodeId> sigma;

  std::size_t dims() const noexcept { return static_cast<std::size_t>(R) * (r + 1u); }
  std::span<const double> coords(std::uint64_t u) const { return {x.data() + u * dims(), dims()}; }
  std::span<const NodeId> landmarks(std::uint64_t u) const { return {sigma.data() + u * dims(), dims()}; }

  bool operator==(const Embedding&) const = default;
};

/// One multi-source BFS per (round, set), each over the deduplicated set.
/// Passes write disjoint columns and run on up to `threads` workers.
Embedding build_embedding(const Graph& g, const LandmarkFamily& fam, unsigned threads = 1);

/// l-infinity distance over coordinates reached from both sides; 0 if none.
double lower_bound(const Embedding& emb, std::uint64_t u, std::uint64_t v);

/// Minimum of x[u][i] + x[v][j] over coordinate pairs sharing a closest
/// landmark. Coordinates are grouped by landmark id, so the cost is
/// O(D log D) rather than D^2. Refuses learned ("gnn") embeddings.
std::optional<double> upper_bound(const Embedding& emb, std::uint64_t u, std::uint64_t v);

struct BoundPair {
  double lb = 0;
  std::optional<double> ub;
};

/// Both bounds for one pair; with want_ub == false only lb is computed,
/// which is the only query a learned embedding answers.
BoundPair query(const Embedding& emb, std::uint64_t u, std::uint64_t v, bool want_ub = true);

/// Binary interchange format (little-endian):
///   "LMEB", u16 version, u8 builder, u64 n, u16 M, u16 r, u32 R, u64 seed,
///   n*D values (u64 hop counts for bfs, all-ones = unreached; f64 for gnn),
///   then for bfs only n*D u64 landmark ids (all-ones = undefined).
void write_embedding(const Embedding& emb, std::ostream& out);
Embedding read_embedding(std::istream& in);

inline constexpr std::uint16_t kEmbeddingFormatVersion = 1;

}  // namespace lmk
