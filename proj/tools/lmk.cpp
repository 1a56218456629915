// lmk: command-line entry point for graph generation, ingestion, landmark
// embeddings, queries, shell profiles, validators and benchmark sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "lmk/bench.hpp"
#include "lmk/embedding.hpp"
#include "lmk/error.hpp"
#include "lmk/graph.hpp"
#include "lmk/parallel.hpp"
#include "lmk/random_graph_lab.hpp"
#include "lmk/validation.hpp"

#ifndef LMK_VERSION
#define LMK_VERSION "0.1.0"
#endif

namespace {

namespace fs = std::filesystem;

// Writes through a temporary sibling file and renames it into place.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& body, bool binary = true) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw lmk::IoError("cannot write " + tmp.string());
    body(out);
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw lmk::IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw lmk::IoError("cannot rename into " + path);
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lmk::IoError("cannot open " + path);
  return in;
}

bool has_magic(const std::string& path, std::string_view magic) {
  std::ifstream in(path, std::ios::binary);
  std::string head(magic.size(), '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  return in.gcount() == static_cast<std::streamsize>(magic.size()) && head == magic;
}

struct Options {
  unsigned threads = 0;

  // generate
  lmk::NodeId n = 0;
  double lambda = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "binary";

  // ingest
  std::string in;
  bool lcc = false;

  // embed
  std::string graph;
  std::uint32_t M = 2;
  std::uint32_t r = 0;
  std::uint32_t R = 1;
  std::string family_out;

  // query
  std::string embedding;
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  bool want_lb = false;
  bool want_ub = false;

  // shells
  std::uint32_t kmax = 0;

  // bench
  std::string spec;
  std::string export_dir;
};

struct ValidateOptions {
  std::string check;
  std::string csv;
  std::uint64_t seed = 1;
  std::optional<lmk::NodeId> n;
  double lambda = 5.0;
  std::optional<std::size_t> pairs;
  std::optional<std::size_t> nodes;
  std::optional<std::uint32_t> trials;
  std::optional<std::uint32_t> L;
  std::optional<double> eps;
  std::optional<double> theta;
  std::uint32_t M = 2;
  double varsigma = 0.01;
  double constant = 1.0;
  std::optional<double> compare_constant;
  std::optional<double> threshold;
  std::string sampler = "full-graph";
};

int run_validate(const ValidateOptions& o, unsigned threads) {
  lmk::ValidationReport rep;
  const std::string& c = o.check;
  if (c == "typical-distance") {
    lmk::TypicalDistanceConfig cfg;
    cfg.n = o.n.value_or(cfg.n);
    cfg.lambda = o.lambda;
    cfg.pairs = o.pairs.value_or(cfg.pairs);
    cfg.seed = o.seed;
    rep = lmk::validate_typical_distance(cfg);
  } else if (c == "shell-growth") {
    lmk::ShellGrowthConfig cfg;
    cfg.n = o.n.value_or(cfg.n);
    cfg.lambda = o.lambda;
    cfg.nodes = o.nodes.value_or(cfg.nodes);
    cfg.seed = o.seed;
    if (o.eps) cfg.growth.eps = *o.eps;
    if (o.threshold) cfg.tolerance = *o.threshold;
    rep = lmk::validate_shell_growth(cfg);
  } else if (c == "shell-intersection") {
    lmk::ShellIntersectionConfig cfg;
    cfg.n = o.n.value_or(cfg.n);
    cfg.lambda = o.lambda;
    cfg.pairs = o.pairs.value_or(cfg.pairs);
    cfg.seed = o.seed;
    if (o.eps) cfg.eps = *o.eps;
    rep = lmk::validate_shell_intersection(cfg);
  } else if (c == "coupling" || c == "coupling-trend") {
    lmk::ShellSampler sampler;
    if (o.sampler == "full-graph") sampler = lmk::ShellSampler::full_graph;
    else if (o.sampler == "exploration") sampler = lmk::ShellSampler::exploration;
    else throw lmk::ParameterError("--sampler must be full-graph or exploration");
    if (c == "coupling") {
      lmk::CouplingConfig cfg;
      cfg.params.n = o.n.value_or(cfg.params.n);
      cfg.params.lambda = o.lambda;
      cfg.params.L = o.L.value_or(cfg.params.L);
      cfg.params.trials = o.trials.value_or(cfg.params.trials);
      cfg.params.seed = o.seed;
      cfg.params.sampler = sampler;
      cfg.params.threads = threads;
      if (o.threshold) cfg.max_ks = *o.threshold;
      rep = lmk::validate_coupling(cfg);
    } else {
      lmk::CouplingTrendConfig cfg;
      cfg.lambda = o.lambda;
      cfg.L = o.L.value_or(cfg.L);
      cfg.trials = o.trials.value_or(cfg.trials);
      cfg.seed = o.seed;
      cfg.sampler = sampler;
      cfg.threads = threads;
      rep = lmk::validate_coupling_trend(cfg);
    }
  } else if (c == "branching") {
    lmk::BranchingConfig cfg;
    cfg.lambda = o.lambda;
    cfg.seed = o.seed;
    if (o.trials) cfg.survival_runs = *o.trials;
    rep = lmk::validate_branching(cfg);
  } else if (c == "theorem-lb" || c == "theorem-ub") {
    lmk::TheoremConfig cfg;
    cfg.kind = c == "theorem-lb" ? lmk::BoundKind::lower : lmk::BoundKind::upper;
    cfg.n = o.n.value_or(4000);
    cfg.lambda = o.lambda;
    cfg.eps = o.eps.value_or(0.5);
    cfg.theta = o.theta.value_or(c == "theorem-lb" ? 0.25 : 0.2);
    cfg.M = o.M;
    cfg.varsigma = o.varsigma;
    cfg.constant = o.constant;
    cfg.pairs = o.pairs.value_or(cfg.pairs);
    cfg.seed = o.seed;
    cfg.compare_constant = o.compare_constant;
    cfg.threads = threads;
    if (o.threshold) cfg.max_violation_rate = *o.threshold;
    rep = lmk::validate_theorem(cfg);
  } else if (c == "sandwich") {
    lmk::SandwichConfig cfg;
    cfg.seed = o.seed;
    if (o.trials) cfg.graphs = *o.trials;
    rep = lmk::validate_sandwich(cfg);
  } else if (c == "oracle") {
    lmk::OracleConfig cfg;
    cfg.seed = o.seed;
    if (o.trials) cfg.fixtures = *o.trials;
    rep = lmk::validate_multi_source_oracle(cfg);
  } else {
    throw lmk::ParameterError("unknown check '" + c + "'");
  }
  if (!o.csv.empty()) write_atomically(o.csv, [&](std::ostream& out) { rep.write_csv(out); }, false);
  std::cout << rep.summary_line() << '\n';
  return rep.passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landmark embeddings for approximate graph distances"};
  app.require_subcommand(1);
  Options o;
  ValidateOptions vo;
  app.add_option("--threads", o.threads, "Worker threads (default: $LMK_THREADS or 1)");

  auto* generate = app.add_subcommand("generate", "Generate an Erdos-Renyi graph G(n, lambda/n)");
  generate->add_option("--n", o.n, "Node count")->required();
  generate->add_option("--lambda", o.lambda, "Expected degree lambda (edge probability lambda/n)")->required();
  generate->add_option("--seed", o.seed, "Random seed");
  generate->add_option("--out", o.out, "Output file")->required();
  generate->add_option("--format", o.format, "binary (LMGR) or edgelist")->check(CLI::IsMember({"binary", "edgelist"}));

  auto* ingest = app.add_subcommand("ingest", "Read an edge list (or LMGR file) and write the canonical graph");
  ingest->add_option("--in", o.in, "Input edge list or LMGR file")->required();
  ingest->add_option("--out", o.out, "Output file");
  ingest->add_option("--format", o.format, "binary (LMGR) or edgelist")->check(CLI::IsMember({"binary", "edgelist"}));
  ingest->add_flag("--lcc", o.lcc, "Write only the largest connected component");

  auto* embed = app.add_subcommand("embed", "Sample a landmark family and build the BFS embedding");
  embed->add_option("--graph", o.graph, "Graph file")->required();
  embed->add_option("--M", o.M, "Set size base M > 1");
  embed->add_option("--r", o.r, "Largest exponent r (set sizes M^0..M^r)");
  embed->add_option("--R", o.R, "Number of rounds R");
  embed->add_option("--seed", o.seed, "Random seed");
  embed->add_option("--out", o.out, "Output embedding file")->required();
  embed->add_option("--family-out", o.family_out, "Also write the sampled landmark family");

  auto* query_cmd = app.add_subcommand("query", "Lower/upper distance bounds for one pair");
  query_cmd->add_option("--embedding", o.embedding, "Embedding file")->required();
  query_cmd->add_option("--u", o.u, "First node")->required();
  query_cmd->add_option("--v", o.v, "Second node")->required();
  query_cmd->add_flag("--lb", o.want_lb, "Report the lower bound only (unless --ub is also given)");
  query_cmd->add_flag("--ub", o.want_ub, "Report the upper bound (refused for learned embeddings)");

  auto* shells = app.add_subcommand("shells", "Shell sizes |{w : d(u,w) = k}| for k = 0..kmax");
  shells->add_option("--graph", o.graph, "Graph file")->required();
  shells->add_option("--u", o.u, "Source node")->required();
  shells->add_option("--kmax", o.kmax, "Largest shell depth")->required();

  auto* validate = app.add_subcommand("validate", "Run a statistical validator");
  validate->add_option("check", vo.check,
                       "typical-distance | shell-growth | shell-intersection | coupling | coupling-trend | branching "
                       "| theorem-lb | theorem-ub | sandwich | oracle")
      ->required();
  validate->add_option("--csv", vo.csv, "Write per-trial rows here");
  validate->add_option("--seed", vo.seed, "Random seed");
  validate->add_option("--n", vo.n, "Graph size");
  validate->add_option("--lambda", vo.lambda, "Expected degree");
  validate->add_option("--pairs", vo.pairs, "Sampled pairs");
  validate->add_option("--nodes", vo.nodes, "Sampled nodes (shell-growth)");
  validate->add_option("--trials", vo.trials, "Trials / runs / graphs / fixtures");
  validate->add_option("--L", vo.L, "Shell depth (coupling)");
  validate->add_option("--eps", vo.eps, "Distortion or concentration epsilon");
  validate->add_option("--theta", vo.theta, "Sampling exponent theta");
  validate->add_option("--M", vo.M, "Set size base M");
  validate->add_option("--varsigma", vo.varsigma, "Exponent slack varsigma");
  validate->add_option("--constant", vo.constant, "Constant hidden in Omega(.)");
  validate->add_option("--compare-constant", vo.compare_constant, "Rerun with this constant and require no increase");
  validate->add_option("--threshold", vo.threshold, "Override the check's pass threshold");
  validate->add_option("--sampler", vo.sampler, "full-graph or exploration (coupling checks)");

  auto* bench = app.add_subcommand("bench", "Run a sweep spec and write the distortion CSV");
  bench->add_option("--spec", o.spec, "Sweep spec file")->required();
  bench->add_option("--out", o.out, "CSV output (default: stdout)");
  bench->add_option("--export-dir", o.export_dir, "Write each cell's graph and family here");

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const unsigned threads = lmk::resolve_threads(o.threads);
  try {
    if (*generate) {
      const auto g = lmk::er_generate(o.n, o.lambda, o.seed);
      write_atomically(o.out, [&](std::ostream& out) {
        if (o.format == "binary") lmk::write_graph_binary(g, out);
        else lmk::write_edgelist(g, out);
      });
      std::cout << "generated " << g.num_nodes() << " nodes, " << g.num_edges() << " edges\n";
    } else if (*ingest) {
      lmk::Graph g;
      lmk::EdgeStats dropped;
      if (has_magic(o.in, "LMGR")) {
        auto in = open_input(o.in);
        g = lmk::read_graph_binary(in);
      } else {
        auto in = open_input(o.in);
        auto res = lmk::ingest_edgelist(in);
        g = std::move(res.graph);
        dropped = res.dropped;
      }
      if (g.num_nodes() == 0) throw lmk::EmptySampleError("input contains no edges");
      const auto lcc = lmk::extract_lcc(g);
      std::cout << "graph: " << g.num_nodes() << " nodes, " << g.num_edges() << " edges (dropped "
                << dropped.self_loops << " self-loops, " << dropped.duplicates << " duplicate edges)\n";
      std::cout << "LCC: " << lcc.num_nodes() << " nodes, " << lcc.num_edges() << " edges\n";
      if (!o.out.empty()) {
        const lmk::Graph& target = o.lcc ? lcc : g;
        write_atomically(o.out, [&](std::ostream& out) {
          if (o.format == "binary") lmk::write_graph_binary(target, out);
          else lmk::write_edgelist(target, out);
        });
      }
    } else if (*embed) {
      const auto g = lmk::load_graph(o.graph);
      const auto fam = lmk::sample_family(g.num_nodes(), o.M, o.r, o.R, o.seed);
      if (fam.oversized()) std::cerr << "warning: M^r exceeds the node count\n";
      const auto emb = lmk::build_embedding(g, fam, threads);
      write_atomically(o.out, [&](std::ostream& out) { lmk::write_embedding(emb, out); });
      if (!o.family_out.empty())
        write_atomically(o.family_out, [&](std::ostream& out) { lmk::write_family(fam, out); }, false);
      std::cout << "embedding: " << emb.n << " nodes, D = " << emb.dims() << '\n';
    } else if (*query_cmd) {
      auto in = open_input(o.embedding);
      const auto emb = lmk::read_embedding(in);
      const bool lb_only = o.want_lb && !o.want_ub;
      const bool want_ub = o.want_ub || (!lb_only && emb.builder == lmk::Builder::bfs);
      const auto b = lmk::query(emb, o.u, o.v, want_ub);
      std::cout << "lb " << lmk::format_number(b.lb);
      if (want_ub) std::cout << " ub " << (b.ub ? lmk::format_number(*b.ub) : "undefined");
      std::cout << '\n';
    } else if (*shells) {
      const auto g = lmk::load_graph(o.graph);
      if (o.u >= g.num_nodes()) throw lmk::ParameterError("node out of range");
      const auto p = lmk::shell_profile(g, static_cast<lmk::NodeId>(o.u), o.kmax);
      std::cout << "k,count,cumulative\n";
      for (std::size_t k = 0; k < p.counts.size(); ++k)
        std::cout << k << ',' << p.counts[k] << ',' << p.cumulative[k] << '\n';
    } else if (*validate) {
      return run_validate(vo, threads);
    } else if (*bench) {
      auto in = open_input(o.spec);
      const auto spec = lmk::parse_sweep_spec(in);
      lmk::SweepOptions options;
      options.threads = threads;
      options.export_dir = o.export_dir;
      std::size_t failures = 0;
      if (o.out.empty()) {
        failures = lmk::run_sweep(spec, std::cout, options);
      } else {
        write_atomically(o.out, [&](std::ostream& out) { failures = lmk::run_sweep(spec, out, options); }, false);
      }
      if (failures) std::cerr << "warning: " << failures << " sweep cells failed\n";
    } else {
      std::cout << "lmk " << LMK_VERSION << '\n';
    }
  } catch (const lmk::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
