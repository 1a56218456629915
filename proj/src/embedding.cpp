#include "lmk/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "binary_io.hpp"
#include "lmk/error.hpp"
#include "lmk/parallel.hpp"
#include "lmk/rng.hpp"

namespace lmk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kAllOnes = ~std::uint64_t{0};
constexpr std::uint64_t kMaxSetSize = std::uint64_t{1} << 31;

// M^i, or 0 if it exceeds kMaxSetSize.
std::uint64_t checked_power(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t value = 1;
  for (std::uint32_t k = 0; k < exp; ++k) {
    value *= base;
    if (value > kMaxSetSize) return 0;
  }
  return value;
}

}  // namespace

bool LandmarkFamily::oversized() const noexcept {
  const std::uint64_t top = checked_power(M, r);
  return top == 0 || top > n;
}

LandmarkFamily sample_family(NodeId n, std::uint32_t M, std::uint32_t r, std::uint32_t R, std::uint64_t seed) {
  if (M <= 1) throw ParameterError("sample_family: M must exceed 1");
  if (n == 0) throw ParameterError("sample_family: empty node set");
  if (R == 0) throw ParameterError("sample_family: R must be at least 1");
  if (checked_power(M, r) == 0) throw ParameterError("sample_family: M^r too large");

  LandmarkFamily fam{M, r, R, seed, n, {}};
  fam.sets.reserve(fam.dims());
  Rng rng = make_rng(seed, "family");
  for (std::uint32_t round = 0; round < R; ++round) {
    for (std::uint32_t i = 0; i <= r; ++i) {
      std::vector<NodeId> members(checked_power(M, i));
      for (auto& s : members) s = static_cast<NodeId>(uniform_below(rng, n));
      fam.sets.push_back(std::move(members));
    }
  }
  return fam;
}

void write_family(const LandmarkFamily& fam, std::ostream& out) {
  std::ostringstream buf;
  buf << "# landmark family\n"
      << "n " << fam.n << "\nM " << fam.M << "\nr " << fam.r << "\nR " << fam.R << "\nseed " << fam.seed << '\n';
  for (std::uint32_t round = 0; round < fam.R; ++round) {
    for (std::uint32_t i = 0; i <= fam.r; ++i) {
      buf << round << ' ' << i << " :";
      for (NodeId s : fam.set(round, i)) buf << ' ' << s;
      buf << '\n';
    }
  }
  detail::write_all(out, buf.str());
}

LandmarkFamily read_family(std::istream& in) {
  LandmarkFamily fam;
  std::string line;
  std::size_t line_no = 0;
  int header_fields = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (header_fields < 5) {
      std::string key;
      std::uint64_t value = 0;
      if (!(ls >> key >> value)) throw ParseError(line_no, "expected '<key> <value>'");
      if (key == "n") fam.n = static_cast<NodeId>(value);
      else if (key == "M") fam.M = static_cast<std::uint32_t>(value);
      else if (key == "r") fam.r = static_cast<std::uint32_t>(value);
      else if (key == "R") fam.R = static_cast<std::uint32_t>(value);
      else if (key == "seed") fam.seed = value;
      else throw ParseError(line_no, "unknown header key '" + key + "'");
      ++header_fields;
      continue;
    }
    std::uint64_t round = 0;
    std::uint64_t index = 0;
    std::string colon;
    if (!(ls >> round >> index >> colon) || colon != ":") throw ParseError(line_no, "expected '<round> <index> : ids'");
    if (round * (fam.r + 1) + index != fam.sets.size() || index > fam.r)
      throw ParseError(line_no, "set out of order");
    std::vector<NodeId> members;
    std::uint64_t id = 0;
    while (ls >> id) {
      if (id >= fam.n) throw ParseError(line_no, "landmark id out of range");
      members.push_back(static_cast<NodeId>(id));
    }
    if (!ls.eof()) throw ParseError(line_no, "bad landmark id");
    if (members.size() != checked_power(fam.M, static_cast<std::uint32_t>(index)))
      throw ParseError(line_no, "set size is not M^i");
    fam.sets.push_back(std::move(members));
  }
  if (header_fields < 5) throw FormatError("family: incomplete header");
  if (fam.M <= 1) throw FormatError("family: M must exceed 1");
  if (fam.sets.size() != fam.dims()) throw FormatError("family: expected R*(r+1) sets");
  return fam;
}

const char* builder_name(Builder b) noexcept { return b == Builder::bfs ? "bfs" : "gnn"; }

Embedding build_embedding(const Graph& g, const LandmarkFamily& fam, unsigned threads) {
  if (fam.M > std::numeric_limits<std::uint16_t>::max() || fam.r > std::numeric_limits<std::uint16_t>::max())
    throw ParameterError("build_embedding: M and r must fit in 16 bits");
  if (fam.sets.size() != fam.dims()) throw ParameterError("build_embedding: family shape mismatch");
  const NodeId n = g.num_nodes();
  for (const auto& set : fam.sets) {
    if (set.empty()) throw ParameterError("build_embedding: empty landmark set");
    for (NodeId s : set)
      if (s >= n) throw ParameterError("build_embedding: landmark id out of range");
  }

  Embedding emb;
  emb.n = n;
  emb.M = static_cast<std::uint16_t>(fam.M);
  emb.r = static_cast<std::uint16_t>(fam.r);
  emb.R = fam.R;
  emb.seed = fam.seed;
  emb.builder = Builder::bfs;
  const std::size_t D = emb.dims();
  emb.x.assign(static_cast<std::size_t>(n) * D, kInf);
  emb.sigma.assign(static_cast<std::size_t>(n) * D, kNoNode);

  parallel_for(D, threads, [&](std::size_t c) {
    std::vector<NodeId> members(fam.sets[c]);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    const auto res = multi_source_bfs(g, members);
    for (NodeId u = 0; u < n; ++u) {
      if (res.dist[u] == kUnreached) continue;
      emb.x[u * D + c] = res.dist[u];
      emb.sigma[u * D + c] = res.closest[u];
    }
  });
  return emb;
}

double lower_bound(const Embedding& emb, std::uint64_t u, std::uint64_t v) {
  if (u >= emb.n || v >= emb.n) throw ParameterError("lower_bound: node out of range");
  const auto xu = emb.coords(u);
  const auto xv = emb.coords(v);
  double best = 0.0;
  for (std::size_t c = 0; c < xu.size(); ++c) {
    if (std::isinf(xu[c]) || std::isinf(xv[c])) continue;
    best = std::max(best, std::abs(xu[c] - xv[c]));
  }
  return best;
}

namespace {

using Keyed = std::pair<NodeId, double>;

// (landmark, distance) pairs of node u, sorted by landmark then distance.
void collect_by_landmark(const Embedding& emb, std::uint64_t u, std::vector<Keyed>& out) {
  out.clear();
  const auto xu = emb.coords(u);
  const auto su = emb.landmarks(u);
  for (std::size_t c = 0; c < xu.size(); ++c)
    if (su[c] != kNoNode && !std::isinf(xu[c])) out.emplace_back(su[c], xu[c]);
  std::sort(out.begin(), out.end());
}

}  // namespace

std::optional<double> upper_bound(const Embedding& emb, std::uint64_t u, std::uint64_t v) {
  if (emb.builder != Builder::bfs)
    throw UnsupportedOperation("upper_bound: learned embeddings only support lower bounds");
  if (u >= emb.n || v >= emb.n) throw ParameterError("upper_bound: node out of range");
  thread_local std::vector<Keyed> au;
  thread_local std::vector<Keyed> av;
  collect_by_landmark(emb, u, au);
  collect_by_landmark(emb, v, av);

  // After sorting, the first entry of each landmark run is its minimum.
  std::optional<double> best;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < au.size() && j < av.size()) {
    if (au[i].first < av[j].first) {
      ++i;
    } else if (av[j].first < au[i].first) {
      ++j;
    } else {
      const NodeId s = au[i].first;
      const double candidate = au[i].second + av[j].second;
      if (!best || candidate < *best) best = candidate;
      while (i < au.size() && au[i].first == s) ++i;
      while (j < av.size() && av[j].first == s) ++j;
    }
  }
  return best;
}

BoundPair query(const Embedding& emb, std::uint64_t u, std::uint64_t v, bool want_ub) {
  if (emb.dims() == 0) throw ParameterError("query: embedding has no coordinates");
  BoundPair out;
  out.lb = lower_bound(emb, u, v);
  if (want_ub) out.ub = upper_bound(emb, u, v);
  return out;
}

void write_embedding(const Embedding& emb, std::ostream& out) {
  const std::size_t D = emb.dims();
  if (emb.x.size() != emb.n * D) throw FormatError("embedding: coordinate block has wrong size");
  if (emb.builder == Builder::bfs && emb.sigma.size() != emb.x.size())
    throw FormatError("embedding: landmark block has wrong size");

  std::string buf = "LMEB";
  buf.reserve(buf.size() + 32 + emb.x.size() * 16);
  detail::put_le<std::uint16_t>(buf, kEmbeddingFormatVersion);
  detail::put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(emb.builder));
  detail::put_le<std::uint64_t>(buf, emb.n);
  detail::put_le<std::uint16_t>(buf, emb.M);
  detail::put_le<std::uint16_t>(buf, emb.r);
  detail::put_le<std::uint32_t>(buf, emb.R);
  detail::put_le<std::uint64_t>(buf, emb.seed);
  if (emb.builder == Builder::bfs) {
    for (double value : emb.x) {
      if (std::isinf(value)) {
        detail::put_le<std::uint64_t>(buf, kAllOnes);
      } else {
        if (value < 0 || value != std::floor(value)) throw FormatError("embedding: bfs coordinate is not a hop count");
        detail::put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(value));
      }
    }
    for (NodeId s : emb.sigma) detail::put_le<std::uint64_t>(buf, s == kNoNode ? kAllOnes : s);
  } else {
    for (double value : emb.x) detail::put_f64(buf, value);
  }
  detail::write_all(out, buf);
}

Embedding read_embedding(std::istream& in) {
  const std::string data = detail::slurp(in);
  detail::ByteReader rd(data, "embedding");
  rd.expect_magic("LMEB");
  if (rd.get_le<std::uint16_t>() != kEmbeddingFormatVersion) throw FormatError("embedding: unsupported version");
  const auto tag = rd.get_le<std::uint8_t>();
  if (tag > 1) throw FormatError("embedding: unknown builder tag");

  Embedding emb;
  emb.builder = static_cast<Builder>(tag);
  emb.n = rd.get_le<std::uint64_t>();
  emb.M = rd.get_le<std::uint16_t>();
  emb.r = rd.get_le<std::uint16_t>();
  emb.R = rd.get_le<std::uint32_t>();
  emb.seed = rd.get_le<std::uint64_t>();
  if (emb.n >= kNoNode) throw FormatError("embedding: node count too large");

  const std::uint64_t D = emb.dims();
  const std::uint64_t blocks = emb.builder == Builder::bfs ? 2 : 1;
  if (D != 0 && emb.n > rd.remaining() / (8 * D * blocks)) throw FormatError("embedding: truncated");
  if (rd.remaining() != emb.n * D * 8 * blocks) throw FormatError("embedding: payload size does not match header");

  const std::size_t count = emb.n * D;
  emb.x.resize(count);
  if (emb.builder == Builder::bfs) {
    for (auto& value : emb.x) {
      const auto raw = rd.get_le<std::uint64_t>();
      value = raw == kAllOnes ? kInf : static_cast<double>(raw);
    }
    emb.sigma.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto raw = rd.get_le<std::uint64_t>();
      if (raw == kAllOnes) {
        emb.sigma[i] = kNoNode;
      } else if (raw >= emb.n) {
        throw FormatError("embedding: landmark id out of range");
      } else {
        emb.sigma[i] = static_cast<NodeId>(raw);
      }
      if ((emb.sigma[i] == kNoNode) != std::isinf(emb.x[i]))
        throw FormatError("embedding: landmark and distance disagree on reachability");
    }
  } else {
    for (auto& value : emb.x) {
      value = rd.get_f64();
      if (std::isnan(value)) throw FormatError("embedding: NaN coordinate");
    }
  }
  return emb;
}

}  // namespace lmk
