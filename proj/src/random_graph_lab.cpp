#include "lmk/random_graph_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lmk/error.hpp"
#include "lmk/parallel.hpp"

namespace lmk {

ShellProfile shell_profile(const Graph& g, NodeId u, std::uint32_t k_max) {
  const auto dist = bfs(g, u);
  ShellProfile p;
  p.source = u;
  p.counts.assign(static_cast<std::size_t>(k_max) + 1, 0);
  for (Dist d : dist)
    if (d != kUnreached && d <= k_max) ++p.counts[d];
  p.cumulative.resize(p.counts.size());
  std::partial_sum(p.counts.begin(), p.counts.end(), p.cumulative.begin());
  return p;
}

std::uint64_t shell_intersection(const Graph& g, NodeId u1, NodeId u2, Dist k1, Dist k2) {
  const auto d1 = bfs(g, u1);
  const auto d2 = bfs(g, u2);
  std::uint64_t count = 0;
  for (std::size_t w = 0; w < d1.size(); ++w) count += (d1[w] == k1 && d2[w] == k2);
  return count;
}

const char* growth_status_name(GrowthStatus s) noexcept {
  switch (s) {
    case GrowthStatus::pass: return "pass";
    case GrowthStatus::fail: return "fail";
    case GrowthStatus::skip: return "skip";
    case GrowthStatus::precondition: return "precondition";
  }
  return "?";
}

GrowthCheck shell_growth_check(const Graph& g, const ComponentLabeling& comp, NodeId u, double lambda,
                               const GrowthParams& params) {
  GrowthCheck out;
  const NodeId n = g.num_nodes();
  if (u >= n) throw ParameterError("shell_growth_check: node out of range");
  if (comp.label.size() != n) throw ParameterError("shell_growth_check: labeling does not match graph");
  if (!(lambda > 1.0) || n < 2) {
    out.status = GrowthStatus::precondition;
    out.note = "requires lambda > 1";
    return out;
  }
  if (!(params.kappa0 > 0 && params.kappa0 < 0.5) || !(params.kappa > 0 && params.kappa < 1 - params.kappa0) ||
      !(params.eps > 0 && params.eps < params.kappa0)) {
    out.status = GrowthStatus::precondition;
    out.note = "requires kappa0 in (0,1/2), kappa in (0,1-kappa0), eps in (0,kappa0)";
    return out;
  }
  const double log_n = std::log(static_cast<double>(n)) / std::log(lambda);
  const auto L = static_cast<std::uint32_t>(std::floor(params.kappa0 * log_n));
  const auto top = static_cast<std::uint32_t>(std::floor((params.kappa0 + params.kappa) * log_n));
  if (L < 1 || top <= L) {
    out.status = GrowthStatus::precondition;
    out.note = "lambda too large for n: no shell depth satisfies the growth window";
    return out;
  }
  const std::uint32_t k = params.k.value_or(top - L);
  if (k < 1 || L + k > top) {
    out.status = GrowthStatus::precondition;
    out.note = "k outside (0, (kappa0+kappa) log_lambda n - L]";
    return out;
  }
  out.L = L;
  out.k = k;
  if (comp.label[u] != 0) {
    out.status = GrowthStatus::skip;
    out.note = "node outside the largest component";
    return out;
  }
  out.counts = shell_profile(g, u, L + k).counts;
  if (out.counts[L] == 0) {
    out.status = GrowthStatus::skip;
    out.note = "empty shell at depth L";
    return out;
  }

  const double nd = static_cast<double>(n);
  out.chain_holds = true;
  for (std::uint32_t l = 0; l <= k; ++l) {
    const double scale = std::pow(lambda, static_cast<double>(L + l));
    const double c = static_cast<double>(out.counts[L + l]);
    if (c < std::pow(nd, -params.eps) * scale || c > std::pow(nd, params.eps) * scale) out.chain_holds = false;
  }
  double sum = 0;
  for (std::uint32_t l = L; l < L + k; ++l) {
    const double ratio = out.counts[l] == 0 ? 0.0
                                            : static_cast<double>(out.counts[l + 1]) / static_cast<double>(out.counts[l]);
    out.ratios.push_back(ratio);
    sum += ratio;
  }
  out.arithmetic_mean_ratio = sum / k;
  out.geometric_mean_ratio =
      std::pow(static_cast<double>(out.counts[L + k]) / static_cast<double>(out.counts[L]), 1.0 / k);
  out.status = out.chain_holds ? GrowthStatus::pass : GrowthStatus::fail;
  return out;
}

// ---------------------------------------------------------------------------

BranchingTrace branching_trace(double lambda, std::uint32_t L, std::uint64_t seed) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("branching_trace: lambda must be >= 0");
  BranchingTrace t;
  t.lambda = lambda;
  t.seed = seed;
  t.sizes.reserve(static_cast<std::size_t>(L) + 1);
  t.sizes.push_back(1);
  Rng rng = make_rng(seed, "branching");
  for (std::uint32_t l = 0; l < L; ++l) {
    const std::uint64_t current = t.sizes.back();
    if (current == 0 || lambda == 0.0) {
      t.sizes.push_back(0);
      continue;
    }
    const double mean = lambda * static_cast<double>(current);
    if (t.saturated || mean > static_cast<double>(kBranchingCap)) {
      t.saturated = true;
      t.sizes.push_back(kBranchingCap);
      continue;
    }
    std::poisson_distribution<std::uint64_t> offspring(mean);
    t.sizes.push_back(std::min(offspring(rng), kBranchingCap));
  }
  return t;
}

double survival_probability(double lambda) {
  if (!(lambda > 1.0)) return 0.0;
  double z = 1.0;
  for (int it = 0; it < 10000; ++it) {
    const double next = 1.0 - std::exp(-lambda * z);
    if (std::abs(next - z) < 1e-15) return next;
    z = next;
  }
  return z;
}

// ---------------------------------------------------------------------------

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySampleError("ks_statistic: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0;
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) x = sa[i];
    else x = sb[j];
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

std::uint64_t explore_shell_size(NodeId n, double lambda, std::uint32_t L, Rng& rng) {
  if (n == 0) throw ParameterError("explore_shell_size: n must be positive");
  const double p = std::min(1.0, lambda / static_cast<double>(n));
  std::uint64_t active = 1;
  std::uint64_t unexplored = n - 1;
  for (std::uint32_t l = 0; l < L && active > 0; ++l) {
    // P(an unexplored node has at least one edge into the active shell).
    const double q = -std::expm1(static_cast<double>(active) * std::log1p(-p));
    std::binomial_distribution<std::uint64_t> joins(unexplored, p >= 1.0 ? 1.0 : q);
    active = joins(rng);
    unexplored -= active;
  }
  return active;
}

CouplingResult coupling_check(const CouplingParams& params) {
  if (params.n == 0) throw ParameterError("coupling_check: n must be positive");
  if (params.trials == 0) throw ParameterError("coupling_check: trials must be positive");
  CouplingResult out;
  if (params.lambda <= 1.0)
    out.warnings.push_back("subcritical regime (lambda <= 1): outside the supercritical setting");
  const double log_n = std::log(static_cast<double>(params.n)) / std::log(params.lambda);
  if (params.lambda > 1.0 && params.L >= 0.5 * log_n)
    out.warnings.push_back("L >= (1/2) log_lambda n: coupling is not expected to hold at this depth");

  out.shell_sizes.assign(params.trials, 0);
  out.branching_sizes.assign(params.trials, 0);
  parallel_for(params.trials, params.threads, [&](std::size_t t) {
    if (params.sampler == ShellSampler::full_graph) {
      const Graph g = er_generate(params.n, params.lambda, derive_seed(params.seed, "coupling-graph", {t}));
      Rng pick = make_rng(params.seed, "coupling-node", {t});
      const auto u = static_cast<NodeId>(uniform_below(pick, params.n));
      out.shell_sizes[t] = shell_profile(g, u, params.L).counts[params.L];
    } else {
      Rng rng = make_rng(params.seed, "coupling-explore", {t});
      out.shell_sizes[t] = explore_shell_size(params.n, params.lambda, params.L, rng);
    }
    out.branching_sizes[t] =
        branching_trace(params.lambda, params.L, derive_seed(params.seed, "coupling-branch", {t})).sizes.back();
  });

  std::vector<double> a(out.shell_sizes.begin(), out.shell_sizes.end());
  std::vector<double> b(out.branching_sizes.begin(), out.branching_sizes.end());
  out.ks = ks_statistic(a, b);
  return out;
}

// ---------------------------------------------------------------------------

TypicalDistanceResult typical_distance_check(const Graph& g, std::span<const std::pair<NodeId, NodeId>> pairs,
                                             double lambda) {
  if (!(lambda > 1.0)) throw ParameterError("typical_distance_check: lambda must exceed 1");
  const NodeId n = g.num_nodes();
  if (n < 2) throw ParameterError("typical_distance_check: graph too small");
  TypicalDistanceResult out;
  out.log_n = std::log(static_cast<double>(n)) / std::log(lambda);

  // Group by first endpoint so each BFS is run once.
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].first < pairs[b].first; });
  std::vector<double> ratio_of(pairs.size(), -1.0);
  std::vector<Dist> dist;
  NodeId cached = kNoNode;
  for (std::size_t idx : order) {
    const auto [u, v] = pairs[idx];
    if (u >= n || v >= n) throw ParameterError("typical_distance_check: node out of range");
    if (u == v) {
      ++out.identical;
      continue;
    }
    if (u != cached) {
      dist = bfs(g, u);
      cached = u;
    }
    if (dist[v] == kUnreached) {
      ++out.disconnected;
      continue;
    }
    ratio_of[idx] = static_cast<double>(dist[v]) / out.log_n;
  }
  for (double r : ratio_of)
    if (r >= 0) out.ratios.push_back(r);
  if (out.ratios.empty()) throw EmptySampleError("typical_distance_check: no connected pair of distinct nodes");
  double sum = 0;
  for (double r : out.ratios) sum += r;
  out.mean_ratio = sum / static_cast<double>(out.ratios.size());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_common(std::uint64_t n, double eps, std::uint32_t M, double varsigma, double constant) {
  if (n < 2) throw ParameterError("params: n must be at least 2");
  if (!(eps > 0 && eps < 1)) throw ParameterError("params: eps must lie in (0,1)");
  if (M <= 1) throw ParameterError("params: M must exceed 1");
  if (!(varsigma > 0)) throw ParameterError("params: varsigma must be positive");
  if (!(constant > 0)) throw ParameterError("params: constant must be positive");
}

std::uint64_t ceil_count(double value) {
  if (!(value < 1e18)) throw ParameterError("params: R overflows");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(value)));
}

TheoremParams base_params(BoundKind kind, std::uint64_t n, double eps, double theta, std::uint32_t M, double varsigma,
                          double constant) {
  TheoremParams p;
  p.kind = kind;
  p.n = n;
  p.eps = eps;
  p.theta = theta;
  p.M = M;
  p.varsigma = varsigma;
  p.constant = constant;
  // The slack keeps exact powers (theta log_M n integral) from rounding down.
  const double r_real = theta * std::log(static_cast<double>(n)) / std::log(static_cast<double>(M));
  p.r = static_cast<std::uint32_t>(std::floor(r_real + 1e-9));
  return p;
}

}  // namespace

TheoremParams params_lb(std::uint64_t n, double eps, double theta, std::uint32_t M, double varsigma,
                        double constant) {
  check_common(n, eps, M, varsigma, constant);
  if (!(theta > 0 && theta < eps)) throw ParameterError("params_lb: theta must lie in (0, eps)");
  TheoremParams p = base_params(BoundKind::lower, n, eps, theta, M, varsigma, constant);
  const double exponent = 1.0 - eps / 2.0 - std::min(eps / 2.0, theta) + varsigma;
  p.R = ceil_count(constant * M * std::pow(static_cast<double>(n), exponent));
  p.D = p.R * (p.r + 1);
  return p;
}

TheoremParams params_ub(std::uint64_t n, double eps, double theta, std::uint32_t M, double varsigma,
                        double constant) {
  check_common(n, eps, M, varsigma, constant);
  if (!(theta > 0 && theta < (1.0 - eps) / 2.0)) throw ParameterError("params_ub: theta must lie in (0, (1-eps)/2)");
  TheoremParams p = base_params(BoundKind::upper, n, eps, theta, M, varsigma, constant);
  const double ln_n = std::log(static_cast<double>(n));
  const double multiplier = std::log(static_cast<double>(M)) / (theta * ln_n);
  p.R = ceil_count(constant * multiplier * std::pow(static_cast<double>(n), 1.0 - eps + varsigma));
  p.D = p.R * (p.r + 1);
  return p;
}

}  // namespace lmk
