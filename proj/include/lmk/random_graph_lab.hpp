#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmk/graph.hpp"
#include "lmk/rng.hpp"

namespace lmk {

// ---------------------------------------------------------------------------
// Shells

/// counts[k] = number of nodes at distance exactly k from source,
/// cumulative[k] = number within distance k, for k = 0..k_max.
struct ShellProfile {
  NodeId source = 0;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> cumulative;
};

ShellProfile shell_profile(const Graph& g, NodeId u, std::uint32_t k_max);

/// |{w : d(u1,w) = k1 and d(u2,w) = k2}| from two BFS passes.
std::uint64_t shell_intersection(const Graph& g, NodeId u1, NodeId u2, Dist k1, Dist k2);

struct GrowthParams {
  double kappa0 = 0.25;  // L = floor(kappa0 * log_lambda n)
  double kappa = 0.5;    // L + k <= (kappa0 + kappa) * log_lambda n
  double eps = 0.2;      // bracket n^{-eps} lambda^{L+l} .. n^{eps} lambda^{L+l}
  std::optional<std::uint32_t> k;  // default: the largest admissible k
};

enum class GrowthStatus { pass, fail, skip, precondition };

const char* growth_status_name(GrowthStatus s) noexcept;

struct GrowthCheck {
  GrowthStatus status = GrowthStatus::skip;
  std::uint32_t L = 0;
  std::uint32_t k = 0;
  std::vector<std::uint64_t> counts;  // shells 0..L+k
  std::vector<double> ratios;         // counts[l+1]/counts[l] for l = L..L+k-1
  double geometric_mean_ratio = 0;    // (counts[L+k]/counts[L])^(1/k)
  double arithmetic_mean_ratio = 0;
  bool chain_holds = false;  // every shell L..L+k inside its bracket
  std::string note;
};

/// Shell growth from u beyond depth L. `comp` must label g; nodes outside
/// the largest component, or with an empty shell L, return `skip`.
/// Parameters that leave no admissible (L, k) return `precondition`.
GrowthCheck shell_growth_check(const Graph& g, const ComponentLabeling& comp, NodeId u, double lambda,
                               const GrowthParams& params = {});

// ---------------------------------------------------------------------------
// Branching process

inline constexpr std::uint64_t kBranchingCap = 1'000'000'000'000ULL;

/// Generation sizes X_0..X_L of a Galton-Watson process with Poisson(lambda)
/// offspring. A generation is drawn as Poisson(lambda * X_l), the law of the
/// sum of X_l independent offspring counts. Sizes above kBranchingCap are
/// clamped and `saturated` is set; extinction from there has probability
/// below exp(-kBranchingCap * (survival probability)).
struct BranchingTrace {
  double lambda = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> sizes;
  bool saturated = false;

  bool extinct() const noexcept { return !sizes.empty() && sizes.back() == 0; }
};

BranchingTrace branching_trace(double lambda, std::uint32_t L, std::uint64_t seed);

/// Survival probability: the positive root of z = 1 - exp(-lambda z), or 0
/// when lambda <= 1.
double survival_probability(double lambda);

// ---------------------------------------------------------------------------
// Coupling between ER neighbourhoods and the branching process

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|; ties are
/// handled by evaluating both empirical CDFs after each distinct value.
double ks_statistic(std::span<const double> a, std::span<const double> b);

enum class ShellSampler {
  full_graph,   // generate ER(n, lambda), BFS from a uniform node
  exploration,  // reveal only the BFS tree: each unexplored node joins shell
                // l+1 with probability 1 - (1 - p)^{|shell l|}
};

/// |∂N_L(u)| in ER(n, lambda/n) drawn by exploration. Same law as the
/// full-graph sampler at O(L) cost.
std::uint64_t explore_shell_size(NodeId n, double lambda, std::uint32_t L, Rng& rng);

struct CouplingParams {
  NodeId n = 20000;
  double lambda = 5.0;
  std::uint32_t L = 3;
  std::uint32_t trials = 500;
  std::uint64_t seed = 1;
  ShellSampler sampler = ShellSampler::full_graph;
  unsigned threads = 1;
};

struct CouplingResult {
  double ks = 0;
  std::vector<std::uint64_t> shell_sizes;
  std::vector<std::uint64_t> branching_sizes;
  std::vector<std::string> warnings;
};

/// Per trial: one shell size |∂N_L(u)| and one independent X_L. Trial seeds
/// depend on (seed, trial) only, so runs at different n are paired.
CouplingResult coupling_check(const CouplingParams& params);

// ---------------------------------------------------------------------------
// Typical distances

struct TypicalDistanceResult {
  double log_n = 0;  // log_lambda n
  double mean_ratio = 0;
  std::vector<double> ratios;  // d / log_lambda n per used pair
  std::uint64_t identical = 0;
  std::uint64_t disconnected = 0;
};

/// Mean of d(u,v)/log_lambda n over the given pairs, excluding u == v and
/// pairs in different components. Throws EmptySampleError if none remain.
TypicalDistanceResult typical_distance_check(const Graph& g, std::span<const std::pair<NodeId, NodeId>> pairs,
                                             double lambda);

// ---------------------------------------------------------------------------
// Theorem parameter calculators

enum class BoundKind { lower, upper };

struct TheoremParams {
  BoundKind kind = BoundKind::lower;
  std::uint64_t n = 0;
  double eps = 0;
  double theta = 0;
  std::uint32_t M = 2;
  double varsigma = 0;
  double constant = 1;
  std::uint32_t r = 0;  // floor((theta / ln M) ln n)
  std::uint64_t R = 0;
  std::uint64_t D = 0;  // R (r + 1)
};

/// R = ceil(c M n^{1 - eps/2 - min(eps/2, theta) + varsigma}), theta in (0, eps).
TheoremParams params_lb(std::uint64_t n, double eps, double theta, std::uint32_t M, double varsigma,
                        double constant = 1.0);

/// R = ceil(c (ln M / (theta ln n)) n^{1 - eps + varsigma}), theta in (0, (1 - eps)/2).
TheoremParams params_ub(std::uint64_t n, double eps, double theta, std::uint32_t M, double varsigma,
                        double constant = 1.0);

}  // namespace lmk
