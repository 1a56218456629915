#include "lmk/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lmk/error.hpp"
#include "lmk/random_graph_lab.hpp"
#include "lmk/rng.hpp"

namespace lmk {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

std::vector<NodePair> sample_pairs(const Graph& g, std::size_t count, std::uint64_t seed) {
  const auto comp = components(g);
  if (comp.largest() < 2) throw EmptySampleError("sample_pairs: no component with two or more nodes");
  const NodeId n = g.num_nodes();
  Rng rng = make_rng(seed, "pairs");
  std::vector<NodePair> pairs;
  pairs.reserve(count);
  while (pairs.size() < count) {
    const auto u = static_cast<NodeId>(uniform_below(rng, n));
    const auto v = static_cast<NodeId>(uniform_below(rng, n));
    if (u != v && comp.label[u] == comp.label[v]) pairs.emplace_back(u, v);
  }
  return pairs;
}

void summarize(DistortionReport& report) {
  const auto count = static_cast<double>(report.samples.size());
  if (report.samples.empty()) throw EmptySampleError("summarize: no samples");
  double sq = 0;
  double rel = 0;
  std::size_t lb_viol = 0;
  std::size_t ub_viol = 0;
  bool has_ub = report.config.builder == Builder::bfs;
  for (const auto& s : report.samples) {
    const double d = s.d;
    const double diff = d - s.lb;
    sq += diff * diff;
    rel += diff / d;
    if (s.lb < (1.0 - report.eps) * d) ++lb_viol;
    if (!s.ub || *s.ub > (1.0 + report.eps) * d) ++ub_viol;
  }
  report.mse_lb = sq / count;
  report.mean_rel_err_lb = rel / count;
  report.viol_rate_lb = static_cast<double>(lb_viol) / count;
  report.viol_rate_ub = has_ub ? static_cast<double>(ub_viol) / count : std::numeric_limits<double>::quiet_NaN();
}

DistortionReport run_distortion(const Graph& g, const Embedding& emb, std::span<const NodePair> pairs, double eps) {
  if (emb.n != g.num_nodes()) throw ParameterError("run_distortion: embedding built for a different node count");
  if (pairs.empty()) throw EmptySampleError("run_distortion: no pairs");
  if (!(eps > 0 && eps < 1)) throw ParameterError("run_distortion: eps must lie in (0,1)");

  DistortionReport report;
  report.eps = eps;
  report.config.n = g.num_nodes();
  report.config.m = g.num_edges();
  report.config.M = emb.M;
  report.config.r = emb.r;
  report.config.R = emb.R;
  report.config.seed = emb.seed;
  report.config.builder = emb.builder;
  const bool want_ub = emb.builder == Builder::bfs;

  report.samples.resize(pairs.size());
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].first < pairs[b].first; });
  std::vector<Dist> dist;
  NodeId cached = kNoNode;
  for (std::size_t idx : order) {
    const auto [u, v] = pairs[idx];
    if (u != cached) {
      dist = bfs(g, u);
      cached = u;
    }
    if (u == v || dist[v] == kUnreached) throw ParameterError("run_distortion: pairs must be distinct and connected");
    report.samples[idx].u = u;
    report.samples[idx].v = v;
    report.samples[idx].d = dist[v];
  }

  const auto start = Clock::now();
  for (auto& s : report.samples) {
    const BoundPair b = query(emb, s.u, s.v, want_ub);
    s.lb = b.lb;
    s.ub = b.ub;
  }
  report.query_us_per_pair = elapsed_ms(start) * 1000.0 / static_cast<double>(pairs.size());

  if (want_ub) {
    for (const auto& s : report.samples) {
      if (s.lb > s.d || (s.ub && *s.ub < s.d)) {
        std::ostringstream msg;
        msg << "bound violated for pair (" << s.u << ',' << s.v << "): lb=" << s.lb << " d=" << s.d
            << " ub=" << (s.ub ? format_number(*s.ub) : "undefined");
        throw InvariantViolation(msg.str());
      }
    }
  }
  summarize(report);
  return report;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns{
      "graph_source", "n", "m", "lambda", "M", "r", "R", "seed", "builder", "pairs", "mse_lb", "mean_rel_err_lb",
      "viol_rate_lb_eps", "viol_rate_ub_eps", "build_ms", "query_us_per_pair", "status"};
  return columns;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(10) << value;
  return out.str();
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

void write_config(std::ostream& out, const DistortionConfig& c) {
  out << csv_field(c.graph_source) << ',' << c.n << ',' << c.m << ',' << format_number(c.lambda) << ',' << c.M << ','
      << c.r << ',' << c.R << ',' << c.seed << ',' << builder_name(c.builder);
}

}  // namespace

void write_report_header(std::ostream& out) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_report_row(std::ostream& out, const DistortionReport& report, const std::string& status) {
  write_config(out, report.config);
  out << ',' << report.samples.size() << ',' << format_number(report.mse_lb) << ','
      << format_number(report.mean_rel_err_lb) << ',' << format_number(report.viol_rate_lb) << ','
      << format_number(report.viol_rate_ub) << ',' << format_number(report.build_ms) << ','
      << format_number(report.query_us_per_pair) << ',' << csv_field(status) << '\n';
}

void write_failed_row(std::ostream& out, const DistortionConfig& config, const std::string& error) {
  write_config(out, config);
  out << ",0,nan,nan,nan,nan,nan,nan," << csv_field("error: " + error) << '\n';
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_value(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  T value{};
  if constexpr (std::is_unsigned_v<T>) {
    if (!text.empty() && text[0] == '-') throw ParseError(line, "negative value '" + text + "'");
  }
  if (!(in >> value) || !(in >> std::ws).eof()) throw ParseError(line, "bad value '" + text + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::vector<std::string>& values, std::size_t line) {
  std::vector<T> out;
  for (const auto& v : values) out.push_back(parse_value<T>(v, line));
  return out;
}

}  // namespace

SweepSpec parse_sweep_spec(std::istream& in) {
  SweepSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = values'");
    const std::string key = trim(line.substr(0, eq));
    const auto values = split_values(line.substr(eq + 1));
    if (values.empty()) throw ParseError(line_no, "no values for '" + key + "'");
    auto single = [&]() -> const std::string& {
      if (values.size() != 1) throw ParseError(line_no, "'" + key + "' takes a single value");
      return values.front();
    };
    if (key == "graph") spec.graph = values;
    else if (key == "n") spec.n = parse_list<NodeId>(values, line_no);
    else if (key == "lambda") spec.lambda = parse_list<double>(values, line_no);
    else if (key == "M") spec.M = parse_list<std::uint32_t>(values, line_no);
    else if (key == "theta") spec.theta = parse_list<double>(values, line_no);
    else if (key == "eps") spec.eps = parse_list<double>(values, line_no);
    else if (key == "varsigma") spec.varsigma = parse_list<double>(values, line_no);
    else if (key == "constant") spec.constant = parse_list<double>(values, line_no);
    else if (key == "R") spec.R = parse_list<std::uint32_t>(values, line_no);
    else if (key == "r") spec.r = parse_list<std::uint32_t>(values, line_no);
    else if (key == "pairs") spec.pairs = parse_value<std::size_t>(single(), line_no);
    else if (key == "repetitions") spec.repetitions = parse_value<std::uint32_t>(single(), line_no);
    else if (key == "seed") spec.seed = parse_value<std::uint64_t>(single(), line_no);
    else if (key == "gnn_dir") spec.gnn_dir = single();
    else if (key == "calculator") {
      spec.calculator = single();
      if (spec.calculator != "lb" && spec.calculator != "ub") throw ParseError(line_no, "calculator must be lb or ub");
    } else if (key == "builder") {
      spec.builders.clear();
      for (const auto& v : values) {
        if (v == "bfs") spec.builders.push_back(Builder::bfs);
        else if (v == "gnn") spec.builders.push_back(Builder::gnn);
        else throw ParseError(line_no, "unknown builder '" + v + "'");
      }
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  bool uses_er = std::find(spec.graph.begin(), spec.graph.end(), "er") != spec.graph.end();
  if (uses_er && (spec.n.empty() || spec.lambda.empty())) throw ParameterError("sweep: er graphs need n and lambda");
  if (spec.repetitions == 0) throw ParameterError("sweep: repetitions must be at least 1");
  if (spec.pairs == 0) throw ParameterError("sweep: pairs must be at least 1");
  if (spec.M.empty() || spec.theta.empty() || spec.eps.empty() || spec.varsigma.empty() || spec.constant.empty() ||
      spec.builders.empty())
    throw ParameterError("sweep: parameter lists must be nonempty");
  if (std::find(spec.builders.begin(), spec.builders.end(), Builder::gnn) != spec.builders.end() &&
      spec.gnn_dir.empty())
    throw ParameterError("sweep: builder gnn requires gnn_dir");
  return spec;
}

namespace {

std::string cell_name(std::size_t index) {
  std::ostringstream out;
  out << "cell" << std::setw(4) << std::setfill('0') << index;
  return out.str();
}

}  // namespace

std::size_t run_sweep(const SweepSpec& spec, std::ostream& csv, const SweepOptions& options) {
  write_report_header(csv);
  std::size_t failures = 0;
  std::size_t cell_index = 0;
  for (std::size_t gi = 0; gi < spec.graph.size(); ++gi) {
    const std::string& source = spec.graph[gi];
    const bool is_er = source == "er";
    const std::vector<NodeId> ns = is_er ? spec.n : std::vector<NodeId>{0};
    const std::vector<double> lambdas = is_er ? spec.lambda : std::vector<double>{0.0};
    for (NodeId n : ns) {
      for (double lambda : lambdas) {
        for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
          const std::initializer_list<std::uint64_t> key{gi, n, std::bit_cast<std::uint64_t>(lambda), rep};
          const std::uint64_t family_seed = derive_seed(spec.seed, "sweep-family", {rep});

          std::optional<Graph> graph;
          std::vector<NodePair> pairs;
          std::string graph_error;
          try {
            graph = is_er ? er_generate(n, lambda, derive_seed(spec.seed, "sweep-graph", key)) : load_graph(source);
            pairs = sample_pairs(*graph, spec.pairs, derive_seed(spec.seed, "sweep-pairs", key));
          } catch (const std::exception& e) {
            graph_error = e.what();
          }
          const NodeId gn = graph ? graph->num_nodes() : n;
          const double reported_lambda =
              is_er ? lambda : (graph && gn ? 2.0 * static_cast<double>(graph->num_edges()) / gn : 0.0);

          for (std::uint32_t M : spec.M)
            for (double theta : spec.theta)
              for (double eps : spec.eps)
                for (double varsigma : spec.varsigma)
                  for (double constant : spec.constant) {
                    // Resolve (r, R) candidates for this configuration.
                    std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes;
                    std::string shape_error = graph_error;
                    if (shape_error.empty()) {
                      try {
                        std::optional<TheoremParams> calc;
                        if (spec.r.empty() || spec.R.empty()) {
                          calc = spec.calculator == "ub" ? params_ub(gn, eps, theta, M, varsigma, constant)
                                                         : params_lb(gn, eps, theta, M, varsigma, constant);
                          if (calc->R > std::numeric_limits<std::uint32_t>::max())
                            throw ParameterError("sweep: calculator R exceeds 32 bits");
                        }
                        const auto rs = spec.r.empty() ? std::vector<std::uint32_t>{calc->r} : spec.r;
                        const auto Rs = spec.R.empty() ? std::vector<std::uint32_t>{static_cast<std::uint32_t>(calc->R)}
                                                       : spec.R;
                        for (auto rr : rs)
                          for (auto RR : Rs) shapes.emplace_back(rr, RR);
                      } catch (const std::exception& e) {
                        shape_error = e.what();
                      }
                    }
                    if (!shape_error.empty()) shapes.emplace_back(0, 0);

                    for (const auto& [r, R] : shapes) {
                      const std::string cell = cell_name(cell_index++);
                      std::optional<LandmarkFamily> fam;
                      std::string fam_error = shape_error;
                      if (fam_error.empty()) {
                        try {
                          fam = sample_family(gn, M, r, R, family_seed);
                          if (!options.export_dir.empty()) {
                            const std::filesystem::path dir(options.export_dir);
                            std::filesystem::create_directories(dir);
                            std::ofstream gout(dir / (cell + ".graph.lmgr"), std::ios::binary);
                            write_graph_binary(*graph, gout);
                            std::ofstream fout(dir / (cell + ".family.txt"));
                            write_family(*fam, fout);
                          }
                        } catch (const std::exception& e) {
                          fam_error = e.what();
                        }
                      }
                      for (Builder builder : spec.builders) {
                        DistortionConfig config{source, gn, graph ? graph->num_edges() : 0, reported_lambda, M, r, R,
                                                family_seed, builder};
                        if (!fam_error.empty()) {
                          write_failed_row(csv, config, fam_error);
                          ++failures;
                          continue;
                        }
                        try {
                          DistortionReport report;
                          if (builder == Builder::bfs) {
                            const auto start = Clock::now();
                            const Embedding emb = build_embedding(*graph, *fam, options.threads);
                            const double build_ms = elapsed_ms(start);
                            report = run_distortion(*graph, emb, pairs, eps);
                            report.build_ms = build_ms;
                          } else {
                            const auto path = std::filesystem::path(spec.gnn_dir) / (cell + ".gnn.lmeb");
                            std::ifstream in(path, std::ios::binary);
                            if (!in) throw IoError("missing learned embedding " + path.string());
                            const Embedding emb = read_embedding(in);
                            if (emb.builder != Builder::gnn) throw FormatError(path.string() + " is not a gnn embedding");
                            if (emb.dims() != fam->dims()) throw FormatError(path.string() + " has a different shape");
                            report = run_distortion(*graph, emb, pairs, eps);
                            report.build_ms = std::numeric_limits<double>::quiet_NaN();
                          }
                          report.config = config;
                          write_report_row(csv, report);
                        } catch (const std::exception& e) {
                          write_failed_row(csv, config, e.what());
                          ++failures;
                        }
                      }
                    }
                  }
        }
      }
    }
  }
  return failures;
}

// ---------------------------------------------------------------------------

TimingRecord timing_bench(const Graph& g, const LandmarkFamily& fam, std::size_t queries, std::uint64_t seed,
                          unsigned threads) {
  TimingRecord rec;
  rec.n = g.num_nodes();
  rec.m = g.num_edges();
  rec.dims = fam.dims();
  const auto start = Clock::now();
  const Embedding emb = build_embedding(g, fam, threads);
  rec.build_ms = elapsed_ms(start);

  try {
    if (rec.n == 0) throw ParameterError("timing_bench: empty graph");
    Rng rng = make_rng(seed, "timing-queries");
    std::vector<NodePair> batch(queries);
    for (auto& [u, v] : batch) {
      u = static_cast<NodeId>(uniform_below(rng, rec.n));
      v = static_cast<NodeId>(uniform_below(rng, rec.n));
    }
    double sink = 0;
    const auto qstart = Clock::now();
    for (const auto& [u, v] : batch) {
      const BoundPair b = query(emb, u, v);
      sink += b.lb + b.ub.value_or(0.0);
    }
    rec.query_us_per_pair = queries ? elapsed_ms(qstart) * 1000.0 / static_cast<double>(queries) : 0.0;
    rec.queries = queries;
    if (std::isnan(sink)) rec.query_error = "non-numeric bound";
  } catch (const Error& e) {
    rec.query_error = e.what();
    rec.query_us_per_pair = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

}  // namespace lmk
