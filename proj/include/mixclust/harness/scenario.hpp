#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mixclust/init_cluster.hpp"
#include "mixclust/models.hpp"

namespace mixclust::harness {

enum class Method { RefineRspec, RefineSplit, Rspec, M3sc };

std::string_view method_name(Method m) noexcept;
Method parse_method(std::string_view name);
std::vector<Method> parse_method_list(std::string_view csv);
const std::vector<Method>& all_methods();

// One Monte-Carlo sweep over a single simulation parameter. Grid parameter
// names follow the simulation study: "p" (within-community edge
// probability), "alpha" (out-in ratio), "L" (number of layers), "n" (number
// of nodes per layer).
struct ScenarioConfig {
  std::string name = "custom";
  Family family = Family::Bernoulli;
  std::size_t layers = 40;
  std::size_t nodes = 40;
  int K = 2;
  double p = 0.5;
  double alpha = 0.75;
  std::string grid_param = "p";
  std::vector<double> grid_values{0.5};
  int replications = 50;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 1;
  int threads = 1;
  bool timing = false;  // when off the ms column is written as 0
  InitOptions init_options{};

  void validate() const;
};

// Named presets "sim1" .. "sim4".
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct ResultRow {
  std::string scenario;
  std::string method;
  std::string param;
  double value = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
  double hamming = 0.0;  // NaN when the method failed
  double i_star = 0.0;
  double ms = 0.0;
  std::string error;  // not serialised

  bool operator==(const ResultRow&) const = default;
};

// Rows are ordered by (grid value, replication, method order in cfg).
std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg);

inline constexpr std::string_view kCsvHeader = "scenario,method,param,value,rep,seed,hamming,i_star,ms";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);
std::string format_number(double v);  // %.9g

struct SummaryRow {
  std::string method;
  double value = 0.0;
  double mean_hamming = 0.0;
  int count = 0;
  int failures = 0;
};

// Mean Hamming per (method, grid value), failed rows excluded.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
double mean_hamming(const std::vector<ResultRow>& rows, std::string_view method, double value);

// Thread count from the MIXCLUST_THREADS environment variable, else 1.
int default_threads();

}  // namespace mixclust::harness
