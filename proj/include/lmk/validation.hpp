#pragma once

// Statistical validators. Each returns a ValidationReport: one CSV row per
// trial plus a single PASS/FAIL summary line. Thresholds are fields of the
// config structs; the defaults are the values the acceptance suite uses.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lmk/graph.hpp"
#include "lmk/random_graph_lab.hpp"

namespace lmk {

struct ValidationReport {
  std::string name;
  bool passed = false;
  std::string summary;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const;
  std::string summary_line() const;  // "PASS <name>: <summary>" or "FAIL ..."
};

struct TypicalDistanceConfig {
  NodeId n = 10000;
  double lambda = 5.0;
  std::size_t pairs = 1000;
  std::uint64_t seed = 1;
  double min_ratio = 0.8;
  double max_ratio = 1.2;
};
ValidationReport validate_typical_distance(const TypicalDistanceConfig& cfg);

struct ShellGrowthConfig {
  NodeId n = 20000;
  double lambda = 5.0;
  std::size_t nodes = 50;
  std::uint64_t seed = 1;
  GrowthParams growth;
  double tolerance = 0.15;  // arithmetic mean of the per-shell ratios within lambda (1 +- tolerance)
  double min_pass_fraction = 0.9;
};
ValidationReport validate_shell_growth(const ShellGrowthConfig& cfg);

struct ShellIntersectionConfig {
  NodeId n = 20000;
  double lambda = 5.0;
  std::size_t pairs = 100;
  std::uint64_t seed = 1;
  double k_factor = 0.55;  // k1 = k2 = ceil(k_factor log_lambda n)
  double eps = 0.2;
  double zeta = 0.05;
  double kappa0 = 0.25;
  double kappa = 0.5;
  double min_fraction = 0.9;
};
ValidationReport validate_shell_intersection(const ShellIntersectionConfig& cfg);

struct CouplingConfig {
  CouplingParams params;
  double max_ks = 0.1;
};
ValidationReport validate_coupling(const CouplingConfig& cfg);

struct CouplingTrendConfig {
  std::vector<NodeId> sizes{5000, 20000, 80000};
  double lambda = 5.0;
  std::uint32_t L = 3;
  std::uint32_t trials = 500;
  std::uint32_t repetitions = 5;
  std::uint64_t seed = 1;
  ShellSampler sampler = ShellSampler::full_graph;
  unsigned threads = 1;
};
/// Median KS statistic per size must be nonincreasing in n. Repetition j
/// uses the same derived seed at every size.
ValidationReport validate_coupling_trend(const CouplingTrendConfig& cfg);

struct BranchingConfig {
  double lambda = 5.0;
  std::uint32_t generations = 30;
  std::uint32_t survival_runs = 10000;
  std::uint32_t mean_runs = 100000;
  std::uint64_t seed = 1;
  double survival_tolerance = 0.01;
};
/// Mean of X_1 within lambda +- 3 sqrt(lambda / mean_runs), and survival
/// frequency at `generations` within tolerance of the survival probability.
ValidationReport validate_branching(const BranchingConfig& cfg);

struct TheoremConfig {
  BoundKind kind = BoundKind::lower;
  NodeId n = 4000;
  double lambda = 5.0;
  double eps = 0.5;
  double theta = 0.25;
  std::uint32_t M = 2;
  double varsigma = 0.01;
  double constant = 1.0;
  std::size_t pairs = 1000;
  std::uint64_t seed = 1;
  double max_violation_rate = 0.1;
  // When set, the run is repeated with this constant on the same graph,
  // pairs and family seed; its violation rate must not exceed the first.
  std::optional<double> compare_constant;
  unsigned threads = 1;
};
ValidationReport validate_theorem(const TheoremConfig& cfg);

struct SandwichConfig {
  std::uint32_t graphs = 50;
  NodeId min_n = 20;
  NodeId max_n = 200;
  double min_lambda = 2.0;
  double max_lambda = 8.0;
  std::uint64_t seed = 1;
};
/// Exhaustive lb <= d <= ub over all LCC pairs of random ER graphs,
/// against all-pairs single-source BFS.
ValidationReport validate_sandwich(const SandwichConfig& cfg);

struct OracleConfig {
  std::uint32_t fixtures = 100;
  std::uint64_t seed = 1;
};
/// multi_source_bfs against the coordinate-wise minimum (and smallest
/// achieving source) of single-source BFS runs.
ValidationReport validate_multi_source_oracle(const OracleConfig& cfg);

}  // namespace lmk
