#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lmk/parallel.hpp"
#include "lmk/rng.hpp"
#include "lmk/validation.hpp"

using namespace lmk;

TEST_CASE("derive_seed separates tags and indices") {
  std::set<std::uint64_t> seen;
  for (auto* tag : {"a", "b", "graph", "pairs"})
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(7, tag, {i}));
  CHECK(seen.size() == 200);
  CHECK(derive_seed(7, "x", {1, 2}) != derive_seed(7, "x", {2, 1}));
  CHECK(derive_seed(7, "x") == derive_seed(7, "x"));
  static_assert(fnv1a("") == 0xcbf29ce484222325ULL);
  static_assert(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("uniform helpers") {
  Rng rng(1);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[uniform_below(rng, 7)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(uniform_below(rng, 1) == 0);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  for (unsigned threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(100, threads,
                                 [](std::size_t i) {
                                   if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("resolve_threads") {
  CHECK(resolve_threads(3) == 3);
  ::setenv("LMK_THREADS", "4", 1);
  CHECK(resolve_threads(0) == 4);
  ::setenv("LMK_THREADS", "junk", 1);
  CHECK(resolve_threads(0) == 1);
  ::unsetenv("LMK_THREADS");
  CHECK(resolve_threads(0) == 1);
}

TEST_CASE("validators at small scale") {
  SandwichConfig s;
  s.graphs = 5;
  auto sw = validate_sandwich(s);
  CHECK(sw.passed);
  CHECK(sw.rows.size() == 5);
  CHECK(sw.summary_line().rfind("PASS sandwich: 0 violations", 0) == 0);

  OracleConfig o;
  o.fixtures = 10;
  CHECK(validate_multi_source_oracle(o).passed);

  BranchingConfig b;
  b.mean_runs = 20000;
  b.survival_runs = 2000;
  b.survival_tolerance = 0.02;
  CHECK(validate_branching(b).passed);

  TheoremConfig t;
  t.n = 1000;
  t.pairs = 100;
  t.compare_constant = 2.0;
  auto th = validate_theorem(t);
  CHECK(th.rows.size() == 200);
  CHECK(th.summary.find("constant 2") != std::string::npos);

  std::ostringstream csv;
  sw.write_csv(csv);
  CHECK(csv.str().rfind("graph,n_lcc,lambda,M,r,R,pairs,violations\n", 0) == 0);
}
