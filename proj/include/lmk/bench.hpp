#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmk/embedding.hpp"
#include "lmk/graph.hpp"

namespace lmk {

using NodePair = std::pair<NodeId, NodeId>;

/// Uniform pairs over V x V with replacement; a draw is rejected and redrawn
/// until both endpoints differ and share a component.
std::vector<NodePair> sample_pairs(const Graph& g, std::size_t count, std::uint64_t seed);

struct DistortionConfig {
  std::string graph_source = "er";
  NodeId n = 0;
  std::uint64_t m = 0;
  double lambda = 0;
  std::uint32_t M = 2;
  std::uint32_t r = 0;
  std::uint32_t R = 0;
  std::uint64_t seed = 0;
  Builder builder = Builder::bfs;
};

struct PairSample {
  NodeId u = 0;
  NodeId v = 0;
  Dist d = 0;
  double lb = 0;
  std::optional<double> ub;
};

struct DistortionReport {
  DistortionConfig config;
  double eps = 0.5;
  std::vector<PairSample> samples;

  double mse_lb = 0;
  double mean_rel_err_lb = 0;
  double viol_rate_lb = 0;  // fraction with lb < (1 - eps) d
  double viol_rate_ub = 0;  // fraction with ub > (1 + eps) d or ub undefined; NaN without ub
  double build_ms = 0;
  double query_us_per_pair = 0;
};

/// Recomputes the aggregate columns from `samples`.
void summarize(DistortionReport& report);

/// Exact distances come from one BFS per distinct first endpoint. Upper
/// bounds are computed for "bfs" embeddings only. For "bfs" embeddings every
/// sample must satisfy lb <= d <= ub; a violation throws InvariantViolation.
DistortionReport run_distortion(const Graph& g, const Embedding& emb, std::span<const NodePair> pairs,
                                double eps = 0.5);

// ---------------------------------------------------------------------------
// CSV

/// graph_source,n,m,lambda,M,r,R,seed,builder,pairs,mse_lb,mean_rel_err_lb,
/// viol_rate_lb_eps,viol_rate_ub_eps,build_ms,query_us_per_pair,status
const std::vector<std::string>& report_columns();
inline constexpr std::size_t kTimingColumnFirst = 14;  // build_ms, query_us_per_pair

void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const DistortionReport& report, const std::string& status = "ok");
void write_failed_row(std::ostream& out, const DistortionConfig& config, const std::string& error);

/// Formats a double the way every CSV in this project does.
std::string format_number(double value);

// ---------------------------------------------------------------------------
// Sweeps

/// Flat "key = v1, v2, ..." text. Keys:
///   graph       er | path to an edge list or LMGR file (default er)
///   n, lambda   ER parameters (ignored for file sources)
///   M, theta, eps, varsigma, constant
///   calculator  lb | ub   (which theorem sets r and R; default lb)
///   R, r        explicit overrides of the calculator's R and r
///   builder     bfs, gnn  (gnn reads <gnn_dir>/<cell>.gnn.lmeb)
///   gnn_dir, pairs, repetitions, seed
struct SweepSpec {
  std::vector<std::string> graph{"er"};
  std::vector<NodeId> n;
  std::vector<double> lambda;
  std::vector<std::uint32_t> M{2};
  std::vector<double> theta{0.25};
  std::vector<double> eps{0.5};
  std::vector<double> varsigma{0.01};
  std::vector<double> constant{1.0};
  std::string calculator = "lb";
  std::vector<std::uint32_t> R;
  std::vector<std::uint32_t> r;
  std::vector<Builder> builders{Builder::bfs};
  std::string gnn_dir;
  std::size_t pairs = 1000;
  std::uint32_t repetitions = 1;
  std::uint64_t seed = 1;
};

SweepSpec parse_sweep_spec(std::istream& in);

struct SweepOptions {
  unsigned threads = 1;
  std::string export_dir;  // when set, <cell>.graph.lmgr and <cell>.family.txt are written there
};

/// One CSV row per configuration x repetition x builder, in spec order.
/// Seeds: graph and pairs depend on (seed, source, n, lambda, repetition),
/// the family on (seed, repetition) only, so rows that differ only in R or
/// builder share graph, pairs and a family prefix. A failing cell yields a
/// row with status "error: ..." and the sweep continues.
/// Returns the number of failed cells.
std::size_t run_sweep(const SweepSpec& spec, std::ostream& csv, const SweepOptions& options = {});

// ---------------------------------------------------------------------------
// Timing

struct TimingRecord {
  NodeId n = 0;
  std::uint64_t m = 0;
  std::size_t dims = 0;
  double build_ms = 0;
  double query_us_per_pair = 0;
  std::size_t queries = 0;
  std::optional<std::string> query_error;
};

TimingRecord timing_bench(const Graph& g, const LandmarkFamily& fam, std::size_t queries = 1000,
                          std::uint64_t seed = 0, unsigned threads = 1);

}  // namespace lmk
