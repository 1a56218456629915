#include "lmk/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "lmk/bench.hpp"
#include "lmk/embedding.hpp"
#include "lmk/error.hpp"
#include "lmk/rng.hpp"

namespace lmk {

void ValidationReport::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

std::string ValidationReport::summary_line() const {
  return std::string(passed ? "PASS " : "FAIL ") + name + ": " + summary;
}

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

double log_base(double value, double base) { return std::log(value) / std::log(base); }

// Uniform node of the largest component (label 0).
NodeId draw_lcc_node(const ComponentLabeling& comp, Rng& rng) {
  const auto n = static_cast<NodeId>(comp.label.size());
  for (;;) {
    const auto u = static_cast<NodeId>(uniform_below(rng, n));
    if (comp.label[u] == 0) return u;
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

ValidationReport validate_typical_distance(const TypicalDistanceConfig& cfg) {
  ValidationReport rep;
  rep.name = "typical-distance";
  rep.columns = {"pair", "u", "v", "d", "ratio"};
  const Graph g = er_generate(cfg.n, cfg.lambda, derive_seed(cfg.seed, "typical-graph"));
  const auto pairs = sample_pairs(g, cfg.pairs, derive_seed(cfg.seed, "typical-pairs"));
  const auto res = typical_distance_check(g, pairs, cfg.lambda);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double ratio = res.ratios[i];
    rep.rows.push_back({num(std::uint64_t{i}), num(std::uint64_t{pairs[i].first}), num(std::uint64_t{pairs[i].second}),
                        num(std::llround(ratio * res.log_n) + 0.0), num(ratio)});
  }
  rep.passed = res.mean_ratio >= cfg.min_ratio && res.mean_ratio <= cfg.max_ratio;
  std::ostringstream s;
  s << "mean d/log_lambda n = " << num(res.mean_ratio) << " over " << res.ratios.size() << " pairs (log_lambda n = "
    << num(res.log_n) << ", required [" << num(cfg.min_ratio) << ", " << num(cfg.max_ratio) << "])";
  rep.summary = s.str();
  return rep;
}

ValidationReport validate_shell_growth(const ShellGrowthConfig& cfg) {
  ValidationReport rep;
  rep.name = "shell-growth";
  rep.columns = {"node", "L", "k", "counts", "geometric_mean_ratio", "arithmetic_mean_ratio", "chain_holds", "status",
                 "within_tolerance"};
  const Graph g = er_generate(cfg.n, cfg.lambda, derive_seed(cfg.seed, "growth-graph"));
  const auto comp = components(g);
  Rng rng = make_rng(cfg.seed, "growth-nodes");
  std::size_t checked = 0;
  std::size_t within = 0;
  std::size_t chains = 0;
  std::string precondition;
  for (std::size_t i = 0; i < cfg.nodes; ++i) {
    const NodeId u = draw_lcc_node(comp, rng);
    const auto check = shell_growth_check(g, comp, u, cfg.lambda, cfg.growth);
    if (check.status == GrowthStatus::precondition) {
      precondition = check.note;
      break;
    }
    std::string counts;
    for (std::size_t l = 0; l < check.counts.size(); ++l) counts += (l ? " " : "") + std::to_string(check.counts[l]);
    bool ok = false;
    if (check.status != GrowthStatus::skip) {
      ++checked;
      ok = std::abs(check.arithmetic_mean_ratio - cfg.lambda) <= cfg.tolerance * cfg.lambda;
      within += ok;
      chains += check.chain_holds;
    }
    rep.rows.push_back({num(std::uint64_t{u}), num(std::uint64_t{check.L}), num(std::uint64_t{check.k}), counts,
                        num(check.geometric_mean_ratio), num(check.arithmetic_mean_ratio),
                        check.chain_holds ? "1" : "0", growth_status_name(check.status), ok ? "1" : "0"});
  }
  std::ostringstream s;
  if (!precondition.empty()) {
    rep.passed = false;
    s << "precondition violated: " << precondition;
  } else {
    const double frac = checked ? static_cast<double>(within) / static_cast<double>(checked) : 0.0;
    rep.passed = checked > 0 && frac >= cfg.min_pass_fraction;
    s << within << "/" << checked << " nodes with mean growth ratio within lambda*(1 +- " << num(cfg.tolerance)
      << ") (required fraction " << num(cfg.min_pass_fraction) << "); event chain held for " << chains << "/"
      << checked;
  }
  rep.summary = s.str();
  return rep;
}

ValidationReport validate_shell_intersection(const ShellIntersectionConfig& cfg) {
  ValidationReport rep;
  rep.name = "shell-intersection";
  rep.columns = {"pair", "u1", "u2", "d", "k", "intersection", "lower", "upper", "inside"};
  const Graph g = er_generate(cfg.n, cfg.lambda, derive_seed(cfg.seed, "intersection-graph"));
  const auto comp = components(g);
  const double nd = static_cast<double>(cfg.n);
  const double log_n = log_base(nd, cfg.lambda);
  const auto k = static_cast<Dist>(std::ceil(cfg.k_factor * log_n));
  const double scale = std::pow(cfg.lambda, 2.0 * k) / nd;
  const double lower = std::pow(nd, -cfg.eps) * scale / 2.0;
  const double upper = std::pow(nd, cfg.eps) * scale;

  std::vector<std::string> warnings;
  const double L = std::floor(cfg.kappa0 * log_n);
  if (!(k > L) || k > (cfg.kappa0 + cfg.kappa) * log_n) warnings.push_back("k outside (L, (kappa0+kappa) log_lambda n]");
  if (!(2.0 * k > (1.0 + cfg.zeta) * log_n)) warnings.push_back("k1 + k2 <= (1+zeta) log_lambda n");

  Rng rng = make_rng(cfg.seed, "intersection-pairs");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < cfg.pairs; ++i) {
    const NodeId u1 = draw_lcc_node(comp, rng);
    NodeId u2 = draw_lcc_node(comp, rng);
    while (u2 == u1) u2 = draw_lcc_node(comp, rng);
    const auto d1 = bfs(g, u1);
    const auto d2 = bfs(g, u2);
    std::uint64_t count = 0;
    for (std::size_t w = 0; w < d1.size(); ++w) count += (d1[w] == k && d2[w] == k);
    const bool ok = static_cast<double>(count) >= lower && static_cast<double>(count) <= upper;
    inside += ok;
    rep.rows.push_back({num(std::uint64_t{i}), num(std::uint64_t{u1}), num(std::uint64_t{u2}),
                        num(std::uint64_t{d1[u2]}), num(std::uint64_t{k}), num(count), num(lower), num(upper),
                        ok ? "1" : "0"});
  }
  const double frac = cfg.pairs ? static_cast<double>(inside) / static_cast<double>(cfg.pairs) : 0.0;
  rep.passed = cfg.pairs > 0 && frac >= cfg.min_fraction;
  std::ostringstream s;
  s << inside << "/" << cfg.pairs << " pairs with |shell_k(u1) ∩ shell_k(u2)| in [" << num(lower) << ", "
    << num(upper) << "] at k = " << k << " (required fraction " << num(cfg.min_fraction) << ")";
  for (const auto& w : warnings) s << "; warning: " << w;
  rep.summary = s.str();
  return rep;
}

ValidationReport validate_coupling(const CouplingConfig& cfg) {
  ValidationReport rep;
  rep.name = "coupling";
  rep.columns = {"trial", "shell_size", "branching_size"};
  const auto res = coupling_check(cfg.params);
  for (std::size_t t = 0; t < res.shell_sizes.size(); ++t)
    rep.rows.push_back({num(std::uint64_t{t}), num(res.shell_sizes[t]), num(res.branching_sizes[t])});
  rep.passed = res.ks < cfg.max_ks;
  std::ostringstream s;
  s << "KS(|shell_L(u)|, X_L) = " << num(res.ks) << " at n = " << cfg.params.n << ", lambda = "
    << num(cfg.params.lambda) << ", L = " << cfg.params.L << ", " << cfg.params.trials << " trials (required < "
    << num(cfg.max_ks) << ")";
  for (const auto& w : res.warnings) s << "; warning: " << w;
  rep.summary = s.str();
  return rep;
}

ValidationReport validate_coupling_trend(const CouplingTrendConfig& cfg) {
  ValidationReport rep;
  rep.name = "coupling-trend";
  rep.columns = {"n", "repetition", "ks"};
  if (cfg.sizes.empty() || cfg.repetitions == 0) throw ParameterError("coupling-trend: empty configuration");
  std::vector<double> medians;
  for (NodeId n : cfg.sizes) {
    std::vector<double> stats;
    for (std::uint32_t rep_index = 0; rep_index < cfg.repetitions; ++rep_index) {
      CouplingParams p;
      p.n = n;
      p.lambda = cfg.lambda;
      p.L = cfg.L;
      p.trials = cfg.trials;
      p.seed = derive_seed(cfg.seed, "coupling-trend", {rep_index});
      p.sampler = cfg.sampler;
      p.threads = cfg.threads;
      const double ks = coupling_check(p).ks;
      stats.push_back(ks);
      rep.rows.push_back({num(std::uint64_t{n}), num(std::uint64_t{rep_index}), num(ks)});
    }
    medians.push_back(median(stats));
  }
  rep.passed = std::is_sorted(medians.begin(), medians.end(), std::greater<>());
  std::ostringstream s;
  s << "median KS by n:";
  for (std::size_t i = 0; i < medians.size(); ++i) s << ' ' << cfg.sizes[i] << "->" << num(medians[i]);
  s << " (required nonincreasing; " << cfg.trials << " trials x " << cfg.repetitions << " repetitions, sampler "
    << (cfg.sampler == ShellSampler::full_graph ? "full-graph" : "exploration") << ")";
  rep.summary = s.str();
  return rep;
}

ValidationReport validate_branching(const BranchingConfig& cfg) {
  ValidationReport rep;
  rep.name = "branching";
  rep.columns = {"run", "generation", "size"};
  double sum_x1 = 0;
  for (std::uint32_t i = 0; i < cfg.mean_runs; ++i)
    sum_x1 += static_cast<double>(branching_trace(cfg.lambda, 1, derive_seed(cfg.seed, "branching-mean", {i})).sizes[1]);
  const double mean_x1 = sum_x1 / cfg.mean_runs;
  const double mean_tol = 3.0 * std::sqrt(cfg.lambda / cfg.mean_runs);

  std::uint32_t survived = 0;
  for (std::uint32_t i = 0; i < cfg.survival_runs; ++i) {
    const auto t = branching_trace(cfg.lambda, cfg.generations, derive_seed(cfg.seed, "branching-survival", {i}));
    survived += !t.extinct();
    rep.rows.push_back({num(std::uint64_t{i}), num(std::uint64_t{cfg.generations}), num(t.sizes.back())});
  }
  const double freq = static_cast<double>(survived) / cfg.survival_runs;
  const double zeta = survival_probability(cfg.lambda);
  const bool mean_ok = std::abs(mean_x1 - cfg.lambda) <= mean_tol;
  const bool survival_ok = std::abs(freq - zeta) <= cfg.survival_tolerance;
  rep.passed = mean_ok && survival_ok;
  std::ostringstream s;
  s << "mean X_1 = " << num(mean_x1) << " (lambda +- " << num(mean_tol) << "); survival at generation "
    << cfg.generations << " = " << num(freq) << " vs zeta = " << num(zeta) << " (+- " << num(cfg.survival_tolerance)
    << ")";
  rep.summary = s.str();
  return rep;
}

ValidationReport validate_theorem(const TheoremConfig& cfg) {
  ValidationReport rep;
  const bool lower = cfg.kind == BoundKind::lower;
  rep.name = lower ? "theorem-lb" : "theorem-ub";
  rep.columns = {"constant", "r", "R", "D", "u", "v", "d", "lb", "ub"};
  auto params_for = [&](double constant) {
    return lower ? params_lb(cfg.n, cfg.eps, cfg.theta, cfg.M, cfg.varsigma, constant)
                 : params_ub(cfg.n, cfg.eps, cfg.theta, cfg.M, cfg.varsigma, constant);
  };
  const Graph g = er_generate(cfg.n, cfg.lambda, derive_seed(cfg.seed, "theorem-graph"));
  const auto pairs = sample_pairs(g, cfg.pairs, derive_seed(cfg.seed, "theorem-pairs"));
  const std::uint64_t family_seed = derive_seed(cfg.seed, "theorem-family");

  auto run = [&](double constant) {
    const auto params = params_for(constant);
    if (params.R > UINT32_MAX) throw ParameterError("theorem: R exceeds 32 bits");
    const auto fam = sample_family(g.num_nodes(), cfg.M, params.r, static_cast<std::uint32_t>(params.R), family_seed);
    const auto emb = build_embedding(g, fam, cfg.threads);
    auto report = run_distortion(g, emb, pairs, cfg.eps);
    for (const auto& smp : report.samples)
      rep.rows.push_back({num(constant), num(std::uint64_t{params.r}), num(params.R), num(params.D),
                          num(std::uint64_t{smp.u}), num(std::uint64_t{smp.v}), num(std::uint64_t{smp.d}), num(smp.lb),
                          smp.ub ? num(*smp.ub) : "undefined"});
    return std::pair{params, lower ? report.viol_rate_lb : report.viol_rate_ub};
  };

  const auto [params, rate] = run(cfg.constant);
  rep.passed = rate < cfg.max_violation_rate;
  std::ostringstream s;
  s << (lower ? "LB" : "UB") << " violation rate at eps = " << num(cfg.eps) << ": " << num(rate) << " with r = "
    << params.r << ", R = " << params.R << ", D = " << params.D << " over " << cfg.pairs
    << " pairs (required < " << num(cfg.max_violation_rate) << ")";
  if (cfg.compare_constant) {
    const auto [params2, rate2] = run(*cfg.compare_constant);
    const bool monotone = rate2 <= rate;
    rep.passed = rep.passed && monotone;
    s << "; constant " << num(*cfg.compare_constant) << " (R = " << params2.R << "): " << num(rate2)
      << (monotone ? " (nonincreasing)" : " (INCREASED)");
  }
  rep.summary = s.str();
  return rep;
}

ValidationReport validate_sandwich(const SandwichConfig& cfg) {
  ValidationReport rep;
  rep.name = "sandwich";
  rep.columns = {"graph", "n_lcc", "lambda", "M", "r", "R", "pairs", "violations"};
  std::uint64_t total_pairs = 0;
  std::uint64_t total_violations = 0;
  for (std::uint32_t gi = 0; gi < cfg.graphs; ++gi) {
    Rng rng = make_rng(cfg.seed, "sandwich", {gi});
    const auto n = static_cast<NodeId>(cfg.min_n + uniform_below(rng, cfg.max_n - cfg.min_n + 1));
    const double lambda = cfg.min_lambda + (cfg.max_lambda - cfg.min_lambda) * uniform01(rng);
    const Graph g = extract_lcc(er_generate(n, lambda, rng()));
    const NodeId nl = g.num_nodes();
    const std::uint32_t M = 2 + static_cast<std::uint32_t>(uniform_below(rng, 2));
    std::uint32_t max_r = 0;
    for (std::uint64_t p = M; p <= nl; p *= M) ++max_r;
    const auto r = static_cast<std::uint32_t>(uniform_below(rng, max_r + 1));
    const auto R = static_cast<std::uint32_t>(1 + uniform_below(rng, 4));
    const auto fam = sample_family(nl, M, r, R, rng());
    const auto emb = build_embedding(g, fam);

    std::uint64_t pairs = 0;
    std::uint64_t violations = 0;
    for (NodeId u = 0; u < nl; ++u) {
      const auto d = bfs(g, u);
      for (NodeId v = 0; v < nl; ++v) {
        const auto b = query(emb, u, v);
        ++pairs;
        if (b.lb > d[v] || !b.ub || *b.ub < d[v]) ++violations;
      }
    }
    total_pairs += pairs;
    total_violations += violations;
    rep.rows.push_back({num(std::uint64_t{gi}), num(std::uint64_t{nl}), num(lambda), num(std::uint64_t{M}),
                        num(std::uint64_t{r}), num(std::uint64_t{R}), num(pairs), num(violations)});
  }
  rep.passed = total_violations == 0;
  std::ostringstream s;
  s << total_violations << " violations of lb <= d <= ub over " << total_pairs << " ordered pairs in " << cfg.graphs
    << " graphs";
  rep.summary = s.str();
  return rep;
}

ValidationReport validate_multi_source_oracle(const OracleConfig& cfg) {
  ValidationReport rep;
  rep.name = "oracle";
  rep.columns = {"fixture", "n", "sources", "mismatches"};
  std::uint64_t total_mismatches = 0;
  for (std::uint32_t fi = 0; fi < cfg.fixtures; ++fi) {
    Rng rng = make_rng(cfg.seed, "oracle", {fi});
    const auto n = static_cast<NodeId>(1 + uniform_below(rng, 200));
    const double lambda = std::min(static_cast<double>(n), 0.5 + 5.5 * uniform01(rng));
    const Graph g = er_generate(n, lambda, rng());
    std::vector<NodeId> sources(1 + uniform_below(rng, std::max<NodeId>(1, n / 4)));
    for (auto& s : sources) s = static_cast<NodeId>(uniform_below(rng, n));

    std::vector<Dist> best(n, kUnreached);
    std::vector<NodeId> arg(n, kNoNode);
    for (NodeId s : sources) {
      const auto d = bfs(g, s);
      for (NodeId u = 0; u < n; ++u) {
        if (d[u] < best[u] || (d[u] == best[u] && d[u] != kUnreached && s < arg[u])) {
          best[u] = d[u];
          arg[u] = s;
        }
      }
    }
    const auto res = multi_source_bfs(g, sources);
    std::uint64_t mismatches = 0;
    for (NodeId u = 0; u < n; ++u) mismatches += (res.dist[u] != best[u] || res.closest[u] != arg[u]);
    total_mismatches += mismatches;
    rep.rows.push_back({num(std::uint64_t{fi}), num(std::uint64_t{n}), num(std::uint64_t{sources.size()}),
                        num(mismatches)});
  }
  rep.passed = total_mismatches == 0;
  std::ostringstream s;
  s << total_mismatches << " mismatching nodes across " << cfg.fixtures << " fixtures";
  rep.summary = s.str();
  return rep;
}

}  // namespace lmk
