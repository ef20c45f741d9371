#include "mixclust/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mixclust/error.hpp"

namespace mixclust::harness {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario", {"name", "family", "methods", "preset"}},
      {"model", {"layers", "nodes", "K", "p", "alpha"}},
      {"sweep", {"param", "values"}},
      {"run", {"replications", "seed", "threads"}},
      {"init", {"c0", "rank"}},
  };
  return keys;
}

template <class T>
T get_value(const pt::ptree& tree, const std::string& path) {
  try {
    return tree.get<T>(path);
  } catch (const pt::ptree_bad_data&) {
    throw ParseError("bad value for '" + path + "': '" + tree.get<std::string>(path) + "'", 0);
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParseError("bad sweep value '" + item + "'", 0);
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw ParseError("bad sweep value '" + item + "'", 0);
    values.push_back(v);
  }
  if (values.empty()) throw ParseError("sweep values are empty", 0);
  return values;
}

}  // namespace

ScenarioConfig parse_scenario_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), static_cast<long>(e.line()));
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ParseError("unknown section [" + section + "]", 0);
    if (body.empty() && !body.data().empty()) throw ParseError("key '" + section + "' outside a section", 0);
    for (const auto& kv : body)
      if (!it->second.count(kv.first)) throw ParseError("unknown key '" + kv.first + "' in [" + section + "]", 0);
  }

  ScenarioConfig cfg;
  if (auto name = tree.get_optional<std::string>("scenario.preset")) cfg = preset(*name);
  if (auto v = tree.get_optional<std::string>("scenario.name")) cfg.name = *v;
  if (auto v = tree.get_optional<std::string>("scenario.family")) cfg.family = parse_family(*v);
  if (auto v = tree.get_optional<std::string>("scenario.methods")) cfg.methods = parse_method_list(*v);
  if (tree.get_optional<std::string>("model.layers")) cfg.layers = get_value<std::size_t>(tree, "model.layers");
  if (tree.get_optional<std::string>("model.nodes")) cfg.nodes = get_value<std::size_t>(tree, "model.nodes");
  if (tree.get_optional<std::string>("model.K")) cfg.K = get_value<int>(tree, "model.K");
  if (tree.get_optional<std::string>("model.p")) cfg.p = get_value<double>(tree, "model.p");
  if (tree.get_optional<std::string>("model.alpha")) cfg.alpha = get_value<double>(tree, "model.alpha");
  if (auto v = tree.get_optional<std::string>("sweep.param")) cfg.grid_param = *v;
  if (auto v = tree.get_optional<std::string>("sweep.values")) cfg.grid_values = parse_values(*v);
  if (tree.get_optional<std::string>("run.replications"))
    cfg.replications = get_value<int>(tree, "run.replications");
  if (tree.get_optional<std::string>("run.seed")) cfg.seed = get_value<std::uint64_t>(tree, "run.seed");
  if (tree.get_optional<std::string>("run.threads")) cfg.threads = get_value<int>(tree, "run.threads");
  if (tree.get_optional<std::string>("init.c0")) cfg.init_options.c0 = get_value<double>(tree, "init.c0");
  if (tree.get_optional<std::string>("init.rank")) cfg.init_options.rank = get_value<int>(tree, "init.rank");
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  return parse_scenario_config(in);
}

}  // namespace mixclust::harness
