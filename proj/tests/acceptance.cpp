// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero if any criterion fails. Thresholds and runtime budgets below are
// fixed; a criterion that exceeds its budget fails even if its statistic
// passes.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <cmath>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lmk/bench.hpp"
#include "lmk/embedding.hpp"
#include "lmk/error.hpp"
#include "lmk/graph.hpp"
#include "lmk/parallel.hpp"
#include "lmk/validation.hpp"

using namespace lmk;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

Verdict from_report(const ValidationReport& rep) {
  return {rep.passed ? Outcome::pass : Outcome::fail, rep.summary};
}

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Verdict()> run;
};

// ---------------------------------------------------------------------------

Verdict check_sandwich() {
  SandwichConfig cfg;
  cfg.graphs = 50;
  cfg.min_n = 20;
  cfg.max_n = 200;
  cfg.min_lambda = 2.0;
  cfg.max_lambda = 8.0;
  cfg.seed = 1;
  return from_report(validate_sandwich(cfg));
}

Verdict check_oracle() {
  OracleConfig cfg;
  cfg.fixtures = 100;
  cfg.seed = 1;
  return from_report(validate_multi_source_oracle(cfg));
}

Verdict check_theorem_lb() {
  TheoremConfig cfg;
  cfg.kind = BoundKind::lower;
  cfg.n = 4000;
  cfg.lambda = 5.0;
  cfg.eps = 0.5;
  cfg.theta = 0.25;
  cfg.varsigma = 0.01;
  cfg.M = 2;
  cfg.constant = 1.0;
  cfg.compare_constant = 4.0;
  cfg.pairs = 1000;
  cfg.max_violation_rate = 0.10;
  cfg.seed = 1;
  return from_report(validate_theorem(cfg));
}

Verdict check_theorem_ub() {
  TheoremConfig cfg;
  cfg.kind = BoundKind::upper;
  cfg.n = 4000;
  cfg.lambda = 5.0;
  cfg.eps = 0.5;
  cfg.theta = 0.2;
  cfg.varsigma = 0.01;
  cfg.M = 2;
  cfg.constant = 1.0;
  cfg.pairs = 1000;
  cfg.max_violation_rate = 0.10;
  cfg.seed = 1;
  return from_report(validate_theorem(cfg));
}

Verdict check_shell_growth() {
  ShellGrowthConfig cfg;
  cfg.n = 20000;
  cfg.lambda = 5.0;
  cfg.nodes = 50;
  cfg.growth.kappa0 = 0.25;
  cfg.growth.kappa = 0.5;
  cfg.tolerance = 0.15;
  cfg.min_pass_fraction = 0.9;
  cfg.seed = 1;
  return from_report(validate_shell_growth(cfg));
}

Verdict check_shell_intersection() {
  ShellIntersectionConfig cfg;
  cfg.n = 20000;
  cfg.lambda = 5.0;
  cfg.pairs = 100;
  cfg.k_factor = 0.55;
  cfg.eps = 0.2;
  cfg.min_fraction = 0.9;
  cfg.seed = 1;
  return from_report(validate_shell_intersection(cfg));
}

Verdict check_typical_distance() {
  TypicalDistanceConfig cfg;
  cfg.n = 10000;
  cfg.lambda = 5.0;
  cfg.pairs = 1000;
  cfg.min_ratio = 0.8;
  cfg.max_ratio = 1.2;
  cfg.seed = 1;
  return from_report(validate_typical_distance(cfg));
}

Verdict check_coupling() {
  CouplingConfig single;
  single.params.n = 20000;
  single.params.lambda = 5.0;
  single.params.L = 3;
  single.params.trials = 500;
  single.params.seed = 1;
  single.params.sampler = ShellSampler::full_graph;
  single.max_ks = 0.1;
  const auto a = validate_coupling(single);

  CouplingTrendConfig trend;
  trend.sizes = {5000, 20000, 80000};
  trend.lambda = 5.0;
  trend.L = 3;
  trend.trials = 200000;
  trend.repetitions = 5;
  trend.seed = 1;
  trend.sampler = ShellSampler::exploration;
  const auto b = validate_coupling_trend(trend);
  return {a.passed && b.passed ? Outcome::pass : Outcome::fail, a.summary + " | " + b.summary};
}

// Looks for a SNAP collaboration file under $LMK_DATA_DIR (default ./data).
std::optional<fs::path> find_data_file(const std::vector<std::string>& names) {
  const char* env = std::getenv("LMK_DATA_DIR");
  const fs::path dir = env && *env ? fs::path(env) : fs::path("data");
  for (const auto& name : names)
    for (const auto& candidate : {dir / name, dir / (name + ".gz")})
      if (fs::exists(candidate) && candidate.extension() != ".gz") return candidate;
  return std::nullopt;
}

Verdict check_snap_ingestion() {
  struct Row {
    const char* label;
    std::vector<std::string> names;
    NodeId nodes;
    std::uint64_t edges;
  };
  const std::vector<Row> rows{{"GR-QC", {"CA-GrQc.txt", "ca-GrQc.txt", "ca-grqc.txt"}, 4158, 13425},
                              {"HEP-TH", {"CA-HepTh.txt", "ca-HepTh.txt", "ca-hepth.txt"}, 8638, 24817}};
  std::ostringstream s;
  bool all_ok = true;
  std::vector<std::string> missing;
  for (const auto& row : rows) {
    const auto path = find_data_file(row.names);
    if (!path) {
      missing.push_back(std::string(row.label) + " (" + row.names.front() + ")");
      continue;
    }
    std::ifstream in(*path);
    const auto lcc = extract_lcc(ingest_edgelist(in).graph);
    const bool ok = lcc.num_nodes() == row.nodes && lcc.num_edges() == row.edges;
    all_ok = all_ok && ok;
    s << row.label << " LCC " << lcc.num_nodes() << " nodes / " << lcc.num_edges() << " edges (expected " << row.nodes
      << " / " << row.edges << ")" << (ok ? "" : " MISMATCH") << "; ";
  }
  if (!missing.empty()) {
    s << "edge-list files not found under $LMK_DATA_DIR (default ./data):";
    for (const auto& m : missing) s << ' ' << m;
    return {Outcome::skip, s.str()};
  }
  return {all_ok ? Outcome::pass : Outcome::fail, s.str()};
}

std::string masked_sweep(const SweepSpec& spec) {
  std::ostringstream out;
  run_sweep(spec, out);
  std::istringstream in(out.str());
  std::ostringstream masked;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    for (std::size_t c = kTimingColumnFirst; c < kTimingColumnFirst + 2 && c < fields.size(); ++c) fields[c] = "*";
    for (std::size_t c = 0; c < fields.size(); ++c) masked << (c ? "," : "") << fields[c];
    masked << '\n';
  }
  return masked.str();
}

Verdict check_determinism() {
  std::istringstream text(
      "n = 2000, 4000\n"
      "lambda = 4, 6\n"
      "calculator = lb\n"
      "constant = 0.25, 1\n"
      "repetitions = 2\n"
      "pairs = 300\n"
      "seed = 20240601\n");
  const auto spec = parse_sweep_spec(text);
  const auto a = masked_sweep(spec);
  const auto b = masked_sweep(spec);
  const auto rows = std::count(a.begin(), a.end(), '\n') - 1;
  const bool same = a == b && rows > 0;
  std::ostringstream s;
  s << rows << " rows, " << a.size() << " bytes with timing columns masked: "
    << (same ? "byte-identical" : "DIFFERENT");
  return {same ? Outcome::pass : Outcome::fail, s.str()};
}

Verdict check_scaling() {
  const std::vector<NodeId> sizes{10000, 20000, 40000};
  const std::uint32_t R = 24, r = 3;
  const int repeats = 7;
  std::vector<double> best;
  for (NodeId n : sizes) {
    const Graph g = er_generate(n, 5.0, derive_seed(1, "scaling-graph", {n}));
    const auto fam = sample_family(n, 2, r, R, derive_seed(1, "scaling-family", {n}));
    double min_ms = 1e300;
    for (int i = 0; i < repeats; ++i) min_ms = std::min(min_ms, timing_bench(g, fam, 0, 1).build_ms);
    best.push_back(min_ms);
  }
  bool ok = true;
  std::ostringstream s;
  s << "min build ms:";
  for (std::size_t i = 0; i < sizes.size(); ++i) s << ' ' << sizes[i] << "->" << format_number(best[i]);
  s << "; ratios";
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    const double ratio = best[i] / best[i - 1];
    ok = ok && ratio >= 1.5 && ratio <= 3.0;
    s << ' ' << format_number(ratio);
  }
  s << " (required within [1.5, 3.0]; lambda = 5, R = " << R << ", r = " << r << ")";
  return {ok ? Outcome::pass : Outcome::fail, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"sandwich", 60, check_sandwich},
      {"oracle", 10, check_oracle},
      {"lower-bound-distortion", 300, check_theorem_lb},
      {"upper-bound-distortion", 300, check_theorem_ub},
      {"shell-growth", 120, check_shell_growth},
      {"shell-intersection", 180, check_shell_intersection},
      {"typical-distance", 60, check_typical_distance},
      {"coupling", 300, check_coupling},
      {"snap-ingestion", 120, check_snap_ingestion},
      {"determinism", 300, check_determinism},
      {"scaling", 300, check_scaling},
  };
  std::vector<std::string> only(argv + 1, argv + argc);

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const Error& e) {
      v = {Outcome::fail, std::string("error: ") + e.kind() + ": " + e.what()};
    } catch (const std::exception& e) {
      v = {Outcome::fail, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (v.outcome == Outcome::pass && secs > c.budget_s) {
      v.outcome = Outcome::fail;
      v.detail += "; over runtime budget";
    }
    const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
    std::cout << tag << ' ' << c.name << " [" << format_number(std::round(secs * 10) / 10) << "s / "
              << format_number(c.budget_s) << "s]: " << v.detail << std::endl;
    failures += v.outcome == Outcome::fail;
  }
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : "acceptance: all criteria passed")
            << std::endl;
  return failures ? 1 : 0;
}
