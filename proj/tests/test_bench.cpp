#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lmk/bench.hpp"
#include "lmk/error.hpp"
#include "lmk/graph.hpp"
#include "lmk/random_graph_lab.hpp"
#include "lmk/rng.hpp"

using namespace lmk;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') field += '"', ++i;
        else if (c == '"') quoted = false;
        else field += c;
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.push_back(field);
        field.clear();
      } else {
        field += c;
      }
    }
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

std::string sweep(const std::string& spec_text, const SweepOptions& options = {}, std::size_t* failures = nullptr) {
  std::istringstream in(spec_text);
  auto spec = parse_sweep_spec(in);
  std::ostringstream out;
  auto f = run_sweep(spec, out, options);
  if (failures) *failures = f;
  return out.str();
}

std::size_t col(const std::string& name) {
  const auto& cols = report_columns();
  return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("lmk-test-" + tag + "-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("sample_pairs") {
  auto edge = path_graph(2);
  for (auto [u, v] : sample_pairs(edge, 100, 1)) CHECK(((u == 0 && v == 1) || (u == 1 && v == 0)));

  auto g = er_generate(10000, 5.0, 1);
  CHECK(sample_pairs(g, 500, 4) == sample_pairs(g, 500, 4));
  CHECK_FALSE(sample_pairs(g, 500, 4) == sample_pairs(g, 500, 5));

  auto comp = components(g);
  auto pairs = sample_pairs(g, 2000, 9);
  int giant = 0;
  for (auto [u, v] : pairs) {
    CHECK(u != v);
    CHECK(comp.label[u] == comp.label[v]);
    giant += comp.label[u] == 0;
  }
  CHECK(giant >= 0.95 * 2000);

  CHECK_THROWS_AS(sample_pairs(Graph::from_edges(5, {}), 3, 1), EmptySampleError);
}

TEST_CASE("run_distortion: exact regime") {
  auto g = extract_lcc(er_generate(300, 4.0, 2));
  const NodeId n = g.num_nodes();
  LandmarkFamily fam;
  fam.M = 2;
  fam.r = 0;
  fam.R = n;
  fam.n = n;
  for (NodeId i = 0; i < n; ++i) fam.sets.push_back({i});
  auto emb = build_embedding(g, fam);
  auto rep = run_distortion(g, emb, sample_pairs(g, 300, 3));
  for (auto& s : rep.samples) {
    CHECK(s.lb == s.d);
    CHECK(s.ub == static_cast<double>(s.d));
  }
  CHECK(rep.mse_lb == 0);
  CHECK(rep.mean_rel_err_lb == 0);
  CHECK(rep.viol_rate_lb == 0);
  CHECK(rep.viol_rate_ub == 0);
}

TEST_CASE("run_distortion: aggregates match the samples") {
  auto g = er_generate(2000, 4.0, 3);
  auto emb = build_embedding(g, sample_family(2000, 2, 3, 2, 3));
  auto rep = run_distortion(g, emb, sample_pairs(g, 400, 3), 0.3);
  double sq = 0, rel = 0, lbv = 0, ubv = 0;
  for (auto& s : rep.samples) {
    CHECK(s.lb <= s.d);
    REQUIRE(s.ub);
    CHECK(*s.ub >= s.d);
    sq += (s.d - s.lb) * (s.d - s.lb);
    rel += (s.d - s.lb) / s.d;
    lbv += s.lb < 0.7 * s.d;
    ubv += *s.ub > 1.3 * s.d;
  }
  const double k = double(rep.samples.size());
  CHECK(rep.mse_lb == doctest::Approx(sq / k));
  CHECK(rep.mean_rel_err_lb == doctest::Approx(rel / k));
  CHECK(rep.viol_rate_lb == doctest::Approx(lbv / k));
  CHECK(rep.viol_rate_ub == doctest::Approx(ubv / k));
}

TEST_CASE("run_distortion: bound violations are hard errors") {
  LandmarkFamily fam;
  fam.M = 2;
  fam.r = 1;
  fam.R = 1;
  fam.n = 4;
  fam.sets = {{0}, {0, 3}};
  auto emb = build_embedding(path_graph(4), fam);
  std::vector<NodePair> pairs{{0, 3}};
  CHECK_THROWS_AS(run_distortion(complete_graph(4), emb, pairs), InvariantViolation);
  std::vector<NodePair> same{{1, 1}};
  CHECK_THROWS_AS(run_distortion(path_graph(4), emb, same), ParameterError);
}

TEST_CASE("run_distortion: learned embeddings report lower bounds only") {
  auto g = path_graph(4);
  Embedding e;
  e.n = 4;
  e.r = 0;
  e.R = 1;
  e.builder = Builder::gnn;
  e.x = {0.0, 1.2, 1.9, 3.1};
  std::vector<NodePair> pairs{{0, 3}, {1, 2}};
  auto rep = run_distortion(g, e, pairs);
  CHECK(std::isnan(rep.viol_rate_ub));
  for (auto& s : rep.samples) CHECK_FALSE(s.ub.has_value());
  CHECK(rep.samples[0].lb == doctest::Approx(3.1));
  CHECK(rep.samples[1].lb == doctest::Approx(0.7));
}

TEST_CASE("more rounds on the same prefix never raise the lower-bound error") {
  auto g = extract_lcc(er_generate(3000, 5.0, 4));
  const NodeId n = g.num_nodes();
  auto pairs = sample_pairs(g, 500, 5);
  double prev_mse = INFINITY, prev_rel = INFINITY;
  for (std::uint32_t R : {1u, 2u, 4u, 8u}) {
    auto rep = run_distortion(g, build_embedding(g, sample_family(n, 2, 3, R, 6)), pairs);
    CHECK(rep.mse_lb <= prev_mse);
    CHECK(rep.mean_rel_err_lb <= prev_rel);
    prev_mse = rep.mse_lb;
    prev_rel = rep.mean_rel_err_lb;
  }
}

TEST_CASE("sweep spec parsing") {
  std::istringstream ok("# comment\nn = 100, 200\nlambda = 4\nbuilder = bfs\nR = 1,2 # trailing\nseed=7\n");
  auto spec = parse_sweep_spec(ok);
  CHECK(spec.n == std::vector<NodeId>{100, 200});
  CHECK(spec.R == std::vector<std::uint32_t>{1, 2});
  CHECK(spec.seed == 7);

  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_sweep_spec(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("n = 10\nlambda = 2\ncolour = red\n") == 3);
  CHECK(line_of("n = 10\nlambda = x\n") == 2);
  CHECK(line_of("n = -10\n") == 1);
  CHECK(line_of("n\n") == 1);
  CHECK(line_of("pairs = 1, 2\n") == 1);
  CHECK(line_of("builder = bfs, foo\n") == 1);

  std::istringstream missing("lambda = 3\n");
  CHECK_THROWS_AS(parse_sweep_spec(missing), ParameterError);
  std::istringstream gnn("n = 10\nlambda = 3\nbuilder = gnn\n");
  CHECK_THROWS_AS(parse_sweep_spec(gnn), ParameterError);
}

TEST_CASE("sweep: one cell is one row matching run_distortion") {
  const std::string text = sweep("n = 500\nlambda = 4\nR = 3\nr = 2\npairs = 200\nseed = 11\n");
  auto rows = parse_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == report_columns());
  const auto& row = rows[1];
  REQUIRE(row.size() == report_columns().size());
  CHECK(row[col("status")] == "ok");

  const std::initializer_list<std::uint64_t> key{0, 500, std::bit_cast<std::uint64_t>(4.0), 0};
  auto g = er_generate(500, 4.0, derive_seed(11, "sweep-graph", key));
  auto pairs = sample_pairs(g, 200, derive_seed(11, "sweep-pairs", key));
  auto fam = sample_family(500, 2, 2, 3, derive_seed(11, "sweep-family", {0}));
  auto rep = run_distortion(g, build_embedding(g, fam), pairs);
  CHECK(row[col("m")] == std::to_string(g.num_edges()));
  CHECK(row[col("mse_lb")] == format_number(rep.mse_lb));
  CHECK(row[col("viol_rate_ub_eps")] == format_number(rep.viol_rate_ub));
  CHECK(row[col("pairs")] == "200");
}

TEST_CASE("sweep: R values give rows with nonincreasing error") {
  auto rows = parse_csv(sweep("n = 2000\nlambda = 5\nR = 1, 4, 16\nr = 3\npairs = 300\n"));
  REQUIRE(rows.size() == 4);
  for (int i = 2; i <= 3; ++i) {
    CHECK(std::stod(rows[i][col("mse_lb")]) <= std::stod(rows[i - 1][col("mse_lb")]));
    CHECK(rows[i][col("m")] == rows[1][col("m")]);
  }
}

TEST_CASE("sweep: calculator fills r and R") {
  auto rows = parse_csv(sweep("n = 1000\nlambda = 5\ncalculator = ub\ntheta = 0.2\npairs = 50\n"));
  REQUIRE(rows.size() == 2);
  auto p = params_ub(1000, 0.5, 0.2, 2, 0.01);
  CHECK(rows[1][col("R")] == std::to_string(p.R));
  CHECK(rows[1][col("r")] == std::to_string(p.r));
}

TEST_CASE("sweep: paired bfs and gnn rows") {
  TempDir dir("pair");
  const std::string base = "n = 400\nlambda = 5\nR = 2\nr = 2\npairs = 100\n";
  SweepOptions opt;
  opt.export_dir = (dir.path / "export").string();
  sweep(base, opt);
  std::ifstream gin(dir.path / "export" / "cell0000.graph.lmgr", std::ios::binary);
  std::ifstream fin(dir.path / "export" / "cell0000.family.txt");
  REQUIRE(gin);
  REQUIRE(fin);
  auto g = read_graph_binary(gin);
  auto fam = read_family(fin);

  // A stand-in learned embedding: exact coordinates shrunk by 10%.
  auto emb = build_embedding(g, fam);
  emb.builder = Builder::gnn;
  emb.sigma.clear();
  for (double& x : emb.x) x = std::isinf(x) ? 1e6 : 0.9 * x;
  fs::create_directories(dir.path / "gnn");
  {
    std::ofstream out(dir.path / "gnn" / "cell0000.gnn.lmeb", std::ios::binary);
    write_embedding(emb, out);
  }
  std::size_t failures = 99;
  auto rows = parse_csv(sweep(base + "builder = bfs, gnn\ngnn_dir = " + (dir.path / "gnn").string() + "\n", {}, &failures));
  CHECK(failures == 0);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][col("builder")] == "bfs");
  CHECK(rows[2][col("builder")] == "gnn");
  for (auto* c : {"n", "m", "seed", "R", "r", "pairs"}) CHECK(rows[1][col(c)] == rows[2][col(c)]);
  CHECK(rows[2][col("viol_rate_ub_eps")] == "nan");
  CHECK(rows[2][col("status")] == "ok");
  // shrinking every coordinate by 10% shrinks every lower bound by 10%
  CHECK(std::stod(rows[2][col("mse_lb")]) >= std::stod(rows[1][col("mse_lb")]));
}

TEST_CASE("sweep: failing cells are reported and the sweep continues") {
  std::size_t failures = 0;
  auto rows = parse_csv(sweep("graph = /nonexistent/file.txt, er\nn = 300\nlambda = 4\nR = 2\nr = 1\npairs = 20\n", {},
                              &failures));
  REQUIRE(rows.size() == 3);
  CHECK(failures == 1);
  CHECK(rows[1][col("status")].rfind("error: ", 0) == 0);
  CHECK(rows[2][col("status")] == "ok");

  auto gnn = parse_csv(sweep("n = 300\nlambda = 4\nR = 2\nr = 1\npairs = 20\nbuilder = bfs, gnn\ngnn_dir = /nonexistent\n",
                             {}, &failures));
  CHECK(failures == 1);
  CHECK(gnn[1][col("status")] == "ok");
  CHECK(gnn[2][col("status")].find("missing learned embedding") != std::string::npos);
}

TEST_CASE("sweep output is deterministic apart from timings") {
  const std::string spec = "n = 800, 1600\nlambda = 3, 5\nR = 1, 3\nr = 2\nrepetitions = 2\npairs = 100\nseed = 5\n";
  auto a = parse_csv(sweep(spec));
  SweepOptions threaded;
  threaded.threads = 3;
  auto b = parse_csv(sweep(spec, threaded));
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == 1 + 2 * 2 * 2 * 2);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t c = 0; c < a[i].size(); ++c)
      if (c != col("build_ms") && c != col("query_us_per_pair")) CHECK(a[i][c] == b[i][c]);
}

TEST_CASE("timing_bench") {
  auto g = er_generate(2000, 5.0, 1);
  auto rec = timing_bench(g, sample_family(2000, 2, 3, 2, 1), 200);
  CHECK(rec.dims == 8);
  CHECK(rec.queries == 200);
  CHECK(rec.build_ms >= 0);
  CHECK_FALSE(rec.query_error.has_value());

  LandmarkFamily empty;
  empty.n = 2000;
  auto none = timing_bench(g, empty, 10);
  CHECK(none.dims == 0);
  CHECK(none.query_error.has_value());
}

TEST_CASE("timing: doubling R roughly doubles the build time") {
  auto g = er_generate(20000, 5.0, 2);
  auto best = [&](std::uint32_t R) {
    auto fam = sample_family(20000, 2, 3, R, 3);
    double ms = 1e300;
    for (int i = 0; i < 7; ++i) ms = std::min(ms, timing_bench(g, fam, 0).build_ms);
    return ms;
  };
  const double ratio = best(16) / best(8);
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.6);
}
