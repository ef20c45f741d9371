#include "mixclust/harness/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "mixclust/discrete.hpp"
#include "mixclust/error.hpp"
#include "mixclust/harness/config.hpp"
#include "mixclust/harness/edge_list.hpp"
#include "mixclust/harness/scenario.hpp"
#include "mixclust/kernels.hpp"
#include "mixclust/models.hpp"
#include "mixclust/refine.hpp"

namespace mixclust::harness {
namespace {

// Shortest round-trip form, always with a decimal point ("1.0", not "1").
std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

// Writes to --out when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ArgumentError("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct SimulateArgs {
  std::string config, preset, family, methods, param, values, out;
  std::optional<std::size_t> layers, nodes;
  std::optional<int> K, replications;
  std::optional<double> p, alpha;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool timing = false;
};

struct ClusterArgs {
  std::string input, family = "bernoulli", init = "rspec", mode = "practical", out;
  int K = 2;
  std::uint64_t seed = 1;
  bool no_self_loops = false;
};

struct DivergenceArgs {
  std::string family;
  std::size_t nodes = 0;
  int trials = 0;
  std::optional<double> p1, p2, theta1, theta2;
  bool no_self_loops = false;
};

struct BenchmarkArgs {
  std::string name, methods, out;
  std::optional<int> replications;
  std::uint64_t seed = 1;
  int threads = 0;
  bool timing = false;
};

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  if (!a.config.empty() && !a.preset.empty()) throw ArgumentError("--config and --preset are exclusive");
  ScenarioConfig cfg;
  if (!a.config.empty()) cfg = load_scenario_config(a.config);
  else if (!a.preset.empty()) cfg = preset(a.preset);
  if (!a.family.empty()) cfg.family = parse_family(a.family);
  if (!a.methods.empty()) cfg.methods = parse_method_list(a.methods);
  if (!a.param.empty()) cfg.grid_param = a.param;
  if (!a.values.empty()) {
    cfg.grid_values.clear();
    std::stringstream ss(a.values);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        cfg.grid_values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ArgumentError("bad grid value '" + item + "'");
      }
    }
  }
  if (a.layers) cfg.layers = *a.layers;
  if (a.nodes) cfg.nodes = *a.nodes;
  if (a.K) cfg.K = *a.K;
  if (a.p) cfg.p = *a.p;
  if (a.alpha) cfg.alpha = *a.alpha;
  if (a.replications) cfg.replications = *a.replications;
  if (a.seed) cfg.seed = *a.seed;
  cfg.threads = a.threads > 0 ? a.threads : (a.config.empty() ? default_threads() : cfg.threads);
  cfg.timing = a.timing;
  Sink sink(a.out, out);
  write_csv(sink.get(), run_scenario(cfg));
}

void run_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  ScenarioConfig cfg = preset(a.name);
  if (a.replications) cfg.replications = *a.replications;
  if (!a.methods.empty()) cfg.methods = parse_method_list(a.methods);
  cfg.seed = a.seed;
  cfg.threads = a.threads > 0 ? a.threads : default_threads();
  cfg.timing = a.timing;
  Sink sink(a.out, out);
  write_csv(sink.get(), run_scenario(cfg));
}

void write_matrix(std::ostream& os, const std::string& section, const Matrix& m) {
  os << '[' << section << "]\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << "row" << r + 1 << " =";
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << ' ' << format_number(m(r, c));
    os << '\n';
  }
}

void write_memberships(std::ostream& os, const std::string& section, const MultilayerData& data, const Labels& sigma) {
  os << '[' << section << "]\n";
  for (std::size_t j = 0; j < sigma.size(); ++j) os << data.node_ids[j] << " = " << sigma[j] + 1 << '\n';
}

void run_cluster(const ClusterArgs& a, std::ostream& out) {
  const Family family = parse_family(a.family);
  const MultilayerData data = load_multilayer_edge_list(a.input, family);
  RefineOptions options;
  options.init = parse_init_kind(a.init);
  options.include_diagonal = !a.no_self_loops;
  RefineResult result;
  if (a.mode == "practical") result = two_stage_practical(data.tensor, a.K, family, a.seed, options);
  else if (a.mode == "loo") result = two_stage_loo(data.tensor, a.K, family, a.seed, options);
  else throw ArgumentError("unknown mode '" + a.mode + "' (expected practical or loo)");

  Sink sink(a.out, out);
  std::ostream& os = sink.get();
  os << "[result]\n"
     << "family = " << family_name(family) << '\n'
     << "K = " << a.K << '\n'
     << "init = " << init_kind_name(options.init) << '\n'
     << "mode = " << a.mode << '\n'
     << "layers = " << data.layer_ids.size() << '\n'
     << "nodes = " << data.node_ids.size() << '\n'
     << "seed = " << a.seed << '\n';
  os << "[labels]\n";
  for (std::size_t i = 0; i < result.labels.size(); ++i) os << data.layer_ids[i] << " = " << result.labels[i] + 1 << '\n';
  os << "[margins]\n";
  for (std::size_t i = 0; i < result.margins.size(); ++i)
    os << data.layer_ids[i] << " = " << format_number(result.margins[i]) << '\n';
  write_memberships(os, "memberships1", data, result.init_used.sigma1);
  write_memberships(os, "memberships2", data, result.init_used.sigma2);
  write_matrix(os, "B1", result.blocks.B[0]);
  write_matrix(os, "B2", result.blocks.B[1]);
  std::vector<std::string> flags = result.flags;
  flags.insert(flags.end(), result.init_used.diagnostics.flags.begin(), result.init_used.diagnostics.flags.end());
  flags.insert(flags.end(), result.blocks.flags.begin(), result.blocks.flags.end());
  os << "[flags]\n";
  for (std::size_t i = 0; i < flags.size(); ++i) os << "flag" << i + 1 << " = " << flags[i] << '\n';
}

double need(const std::optional<double>& v, const char* name) {
  if (!v) throw ArgumentError(std::string("missing --") + name);
  return *v;
}

void run_divergence(const DivergenceArgs& a, std::ostream& out) {
  double value = 0.0;
  if (a.family == "bernoulli" || a.family == "poisson") {
    if (a.nodes == 0) throw ArgumentError("--nodes must be positive");
    const EdgeMatrix P1 = EdgeMatrix::constant(a.nodes, need(a.p1, "p1"));
    const EdgeMatrix P2 = EdgeMatrix::constant(a.nodes, need(a.p2, "p2"));
    value = a.family == "bernoulli" ? renyi_half_bernoulli(P1, P2, !a.no_self_loops)
                                    : renyi_half_poisson(P1, P2, !a.no_self_loops);
  } else if (a.family == "binomial") {
    value = renyi_half_binomial(a.trials, need(a.p1, "p1"), need(a.p2, "p2"));
  } else if (a.family == "poisson-scalar") {
    value = renyi_half_poisson_scalar(need(a.theta1, "theta1"), need(a.theta2, "theta2"));
  } else {
    throw ArgumentError("unknown family '" + a.family + "'");
  }
  out << shortest(value) << '\n';
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-component mixture clustering of multilayer networks", "mixclust"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mixclust 0.1.0");
  std::string isa;
  app.add_option("--isa", isa, "Force the kernel ISA (scalar, avx2)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo scenario and write CSV rows");
  simulate->add_option("--config", sim.config, "Scenario file (INI)");
  simulate->add_option("--preset", sim.preset, "Start from a preset (sim1..sim4)");
  simulate->add_option("--family", sim.family, "bernoulli or poisson");
  simulate->add_option("--methods", sim.methods, "Comma-separated method list");
  simulate->add_option("--param", sim.param, "Swept parameter (p, alpha, L, n)");
  simulate->add_option("--values", sim.values, "Comma-separated grid values");
  simulate->add_option("--layers", sim.layers, "Number of layers");
  simulate->add_option("--nodes", sim.nodes, "Nodes per layer");
  simulate->add_option("--K", sim.K, "Communities per layer");
  simulate->add_option("--p", sim.p, "Within-community probability");
  simulate->add_option("--alpha", sim.alpha, "Out-in ratio");
  simulate->add_option("--replications", sim.replications, "Replications per grid value");
  simulate->add_option("--seed", sim.seed, "Base seed");
  simulate->add_option("--threads", sim.threads, "Worker threads");
  simulate->add_option("--out", sim.out, "Output CSV path (default stdout)");
  simulate->add_flag("--timing", sim.timing, "Record wall time in the ms column");

  ClusterArgs cl;
  auto* cluster = app.add_subcommand("cluster", "Cluster the layers of a multilayer edge list");
  cluster->add_option("input", cl.input, "Edge list: layer src dst [weight]")->required();
  cluster->add_option("--family", cl.family, "bernoulli or poisson");
  cluster->add_option("--K", cl.K, "Communities per layer");
  cluster->add_option("--init", cl.init, "rspec, split or m3sc");
  cluster->add_option("--mode", cl.mode, "practical or loo");
  cluster->add_flag("--no-self-loops", cl.no_self_loops, "Exclude the diagonal from the likelihood");
  cluster->add_option("--seed", cl.seed, "Seed");
  cluster->add_option("--out", cl.out, "Output path (default stdout)");

  DivergenceArgs dv;
  auto* divergence = app.add_subcommand("divergence", "Renyi-1/2 divergence between two components");
  divergence->add_option("--family", dv.family, "bernoulli, poisson, binomial or poisson-scalar")->required();
  divergence->add_option("--nodes", dv.nodes, "Matrix size for constant edge matrices");
  divergence->add_option("--d", dv.trials, "Binomial trials");
  divergence->add_option("--p1", dv.p1, "First probability or intensity");
  divergence->add_option("--p2", dv.p2, "Second probability or intensity");
  divergence->add_option("--theta1", dv.theta1, "First Poisson mean");
  divergence->add_option("--theta2", dv.theta2, "Second Poisson mean");
  divergence->add_flag("--no-self-loops", dv.no_self_loops, "Exclude the diagonal");

  BenchmarkArgs bm;
  auto* benchmark = app.add_subcommand("benchmark", "Run a preset simulation (sim1..sim4)");
  benchmark->add_option("name", bm.name, "Preset name")->required();
  benchmark->add_option("--replications", bm.replications, "Replications per grid value");
  benchmark->add_option("--methods", bm.methods, "Comma-separated method list");
  benchmark->add_option("--seed", bm.seed, "Base seed");
  benchmark->add_option("--threads", bm.threads, "Worker threads");
  benchmark->add_option("--out", bm.out, "Output CSV path (default stdout)");
  benchmark->add_flag("--timing", bm.timing, "Record wall time in the ms column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!isa.empty()) {
      if (isa == "scalar") kernels::set_active_isa(kernels::Isa::Scalar);
      else if (isa == "avx2") kernels::set_active_isa(kernels::Isa::Avx2);
      else throw ArgumentError("unknown ISA '" + isa + "'");
    }
    if (*simulate) run_simulate(sim, out);
    else if (*cluster) run_cluster(cl, out);
    else if (*divergence) run_divergence(dv, out);
    else if (*benchmark) run_benchmark(bm, out);
    return kExitOk;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DegeneracyError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace mixclust::harness
