#include "mixclust/harness/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "mixclust/error.hpp"
#include "mixclust/metrics.hpp"
#include "mixclust/refine.hpp"
#include "mixclust/rng.hpp"

namespace mixclust::harness {
namespace {

struct GridPoint {
  std::size_t layers, nodes;
  double p, alpha;
};

GridPoint apply_grid(const ScenarioConfig& cfg, double value) {
  GridPoint g{cfg.layers, cfg.nodes, cfg.p, cfg.alpha};
  if (cfg.grid_param == "p") g.p = value;
  else if (cfg.grid_param == "alpha") g.alpha = value;
  else if (cfg.grid_param == "L") g.layers = static_cast<std::size_t>(std::llround(value));
  else if (cfg.grid_param == "n") g.nodes = static_cast<std::size_t>(std::llround(value));
  else throw ArgumentError("unknown grid parameter '" + cfg.grid_param + "'");
  return g;
}

Matrix block_matrix(Family family, int K, double p, double alpha) {
  if (family == Family::Bernoulli) return simulation_block_matrix(K, p, alpha);
  if (!(p > 0.0) || alpha < 0.0) throw ArgumentError("Poisson intensities need p > 0 and alpha >= 0");
  Matrix B = Matrix::Constant(K, K, alpha * p);
  B.diagonal().setConstant(p);
  return B;
}

double quantize(double v) {
  return std::isnan(v) ? v : std::strtod(format_number(v).c_str(), nullptr);
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<ResultRow> run_cell(const ScenarioConfig& cfg, double value, int rep, std::uint64_t cell_seed) {
  const GridPoint g = apply_grid(cfg, value);
  const Matrix B = block_matrix(cfg.family, cfg.K, g.p, g.alpha);
  const MixtureBlockParams params = simulation_params(g.layers, g.nodes, cfg.K, B, derive_seed(cell_seed, 1), cfg.family);
  const Tensor3 x = sample_mixture_network(params, derive_seed(cell_seed, 2));

  double i_star = std::numeric_limits<double>::quiet_NaN();
  try {
    const EdgeMatrix P1 = edge_matrix(params.B1, params.sigma1);
    const EdgeMatrix P2 = edge_matrix(params.B2, params.sigma2);
    i_star = cfg.family == Family::Bernoulli ? renyi_half_bernoulli(P1, P2) : renyi_half_poisson(P1, P2);
  } catch (const DomainError&) {
  }

  const std::uint64_t method_seed = derive_seed(cell_seed, 3);
  RefineOptions ropts;
  ropts.init_options = cfg.init_options;

  std::vector<ResultRow> rows;
  // rspec is shared by the rspec and refine-rspec rows.
  std::optional<InitResult> rspec_init;
  double rspec_ms = 0.0;
  for (Method m : cfg.methods) {
    ResultRow row{cfg.name, std::string(method_name(m)), cfg.grid_param, value, rep, cell_seed, 0.0, i_star, 0.0, {}};
    const auto start = Clock::now();
    try {
      Labels labels;
      double extra_ms = 0.0;
      if (m == Method::Rspec || m == Method::RefineRspec) {
        if (!rspec_init) {
          const auto t0 = Clock::now();
          rspec_init = rspec(x, cfg.K, method_seed, cfg.init_options);
          rspec_ms = elapsed_ms(t0);
        } else {
          extra_ms = rspec_ms;
        }
        labels = m == Method::Rspec ? rspec_init->layer_labels
                                    : refine_with_init(x, *rspec_init, cfg.K, cfg.family, ropts).labels;
      } else if (m == Method::RefineSplit) {
        labels = refine_with_init(x, split_init(x, cfg.K, method_seed, cfg.init_options), cfg.K, cfg.family, ropts).labels;
      } else {
        labels = m3_spectral(x, method_seed, cfg.init_options.kmeans);
      }
      row.hamming = hamming_rate(labels, params.z_star, 2);
      row.ms = elapsed_ms(start) + extra_ms;
    } catch (const std::exception& e) {
      row.hamming = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
      row.ms = elapsed_ms(start);
    }
    if (!cfg.timing) row.ms = 0.0;
    // Stored at CSV precision so that rows survive a write/read round trip.
    row.value = quantize(row.value);
    row.hamming = quantize(row.hamming);
    row.i_star = quantize(row.i_star);
    row.ms = quantize(row.ms);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, long line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("bad number '" + s + "'", line);
  return v;
}

}  // namespace

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::RefineRspec: return "refine-rspec";
    case Method::RefineSplit: return "refine-split";
    case Method::Rspec: return "rspec";
    case Method::M3sc: return "m3sc";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods())
    if (method_name(m) == name) return m;
  throw ArgumentError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_method_list(std::string_view csv) {
  std::vector<Method> out;
  std::stringstream ss{std::string(csv)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(parse_method(item));
  }
  if (out.empty()) throw ArgumentError("empty method list");
  return out;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::RefineRspec, Method::RefineSplit, Method::Rspec, Method::M3sc};
  return methods;
}

void ScenarioConfig::validate() const {
  if (replications < 1) throw ArgumentError("replications must be at least 1");
  if (K < 1) throw ArgumentError("K must be positive");
  if (methods.empty()) throw ArgumentError("no methods selected");
  if (grid_values.empty()) throw ArgumentError("empty parameter grid");
  if (threads < 1) throw ArgumentError("threads must be at least 1");
  for (double v : grid_values) {
    const GridPoint g = apply_grid(*this, v);
    (void)block_matrix(family, K, g.p, g.alpha);
    if (g.layers < 2) throw ArgumentError("need at least two layers");
    if (g.nodes < static_cast<std::size_t>(K)) throw ArgumentError("need at least K nodes");
  }
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig cfg;
  cfg.name = std::string(name);
  cfg.layers = 40;
  cfg.nodes = 40;
  cfg.K = 2;
  cfg.alpha = 0.75;
  cfg.p = 0.4;
  if (name == "sim1") {
    cfg.grid_param = "p";
    cfg.grid_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  } else if (name == "sim2") {
    cfg.grid_param = "alpha";
    cfg.grid_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  } else if (name == "sim3") {
    cfg.grid_param = "L";
    cfg.grid_values = {20, 30, 40, 50, 60, 70, 80};
  } else if (name == "sim4") {
    cfg.grid_param = "n";
    cfg.grid_values = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  } else {
    throw ArgumentError("unknown preset '" + std::string(name) + "' (expected sim1..sim4)");
  }
  return cfg;
}

std::vector<std::string> preset_names() { return {"sim1", "sim2", "sim3", "sim4"}; }

int default_threads() {
  if (const char* env = std::getenv("MIXCLUST_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t cells = cfg.grid_values.size() * reps;
  std::vector<std::vector<ResultRow>> per_cell(cells);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      const std::size_t g = c / reps;
      const int rep = static_cast<int>(c % reps);
      per_cell[c] = run_cell(cfg, cfg.grid_values[g], rep, derive_seed(cfg.seed, c));
    }
  };
  const auto threads = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), cells));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::vector<ResultRow> rows;
  rows.reserve(cells * cfg.methods.size());
  for (auto& cell : per_cell)
    for (auto& row : cell) rows.push_back(std::move(row));
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.scenario << ',' << r.method << ',' << r.param << ',' << format_number(r.value) << ',' << r.rep << ','
        << r.seed << ',' << format_number(r.hamming) << ',' << format_number(r.i_star) << ',' << format_number(r.ms)
        << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("missing or unexpected CSV header", 1);
  std::vector<ResultRow> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw ParseError("expected 9 fields, got " + std::to_string(f.size()), lineno);
    ResultRow r;
    r.scenario = f[0];
    r.method = f[1];
    r.param = f[2];
    r.value = parse_double(f[3], lineno);
    r.rep = static_cast<int>(parse_double(f[4], lineno));
    r.seed = std::strtoull(f[5].c_str(), nullptr, 10);
    r.hamming = parse_double(f[6], lineno);
    r.i_star = parse_double(f[7], lineno);
    r.ms = parse_double(f[8], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, double>, std::size_t> index;
  for (const ResultRow& r : rows) {
    auto [it, fresh] = index.try_emplace({r.method, r.value}, out.size());
    if (fresh) out.push_back({r.method, r.value, 0.0, 0, 0});
    SummaryRow& s = out[it->second];
    if (std::isnan(r.hamming)) {
      ++s.failures;
    } else {
      s.mean_hamming += r.hamming;
      ++s.count;
    }
  }
  for (SummaryRow& s : out)
    if (s.count > 0) s.mean_hamming /= s.count;
  return out;
}

double mean_hamming(const std::vector<ResultRow>& rows, std::string_view method, double value) {
  double acc = 0.0;
  int count = 0;
  for (const ResultRow& r : rows) {
    if (r.method != method || r.value != value || std::isnan(r.hamming)) continue;
    acc += r.hamming;
    ++count;
  }
  return count > 0 ? acc / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace mixclust::harness
