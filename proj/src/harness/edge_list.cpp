#include "mixclust/harness/edge_list.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mixclust/error.hpp"

namespace mixclust::harness {
namespace {

struct RawEdge {
  long layer, src, dst;
  double weight;
  long line;
};

long parse_id(const std::string& token, long line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(token, &used);
  } catch (const std::exception&) {
    throw ParseError("id '" + token + "' is not an integer", line);
  }
  if (used != token.size()) throw ParseError("id '" + token + "' is not an integer", line);
  if (v < 0) throw ParseError("negative id '" + token + "'", line);
  return v;
}

double parse_weight(const std::string& token, long line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError("weight '" + token + "' is not a number", line);
  }
  if (used != token.size() || !std::isfinite(v)) throw ParseError("weight '" + token + "' is not a number", line);
  if (v < 0.0) throw ParseError("negative weight '" + token + "'", line);
  return v;
}

// Ids run from the detected base (0 when the minimum id is 0, else 1) to
// the maximum; unused ids in between stay as isolated nodes or empty layers.
std::vector<long> id_range(const std::vector<long>& ids) {
  const auto [lo, hi] = std::minmax_element(ids.begin(), ids.end());
  const long base = *lo == 0 ? 0 : 1;
  std::vector<long> out(static_cast<std::size_t>(*hi - base + 1));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = base + static_cast<long>(i);
  return out;
}

}  // namespace

MultilayerData parse_multilayer_edge_list(std::istream& in, Family family) {
  std::vector<RawEdge> edges;
  std::string line;
  long lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens.size() != 3 && tokens.size() != 4)
      throw ParseError("expected 3 or 4 fields, got " + std::to_string(tokens.size()), lineno);
    if (width == 0) width = tokens.size();
    if (tokens.size() != width)
      throw ParseError("ragged line: " + std::to_string(tokens.size()) + " fields after " + std::to_string(width),
                       lineno);
    RawEdge e{parse_id(tokens[0], lineno), parse_id(tokens[1], lineno), parse_id(tokens[2], lineno),
              tokens.size() == 4 ? parse_weight(tokens[3], lineno) : 1.0, lineno};
    if (family == Family::Poisson && e.weight != std::floor(e.weight))
      throw ParseError("Poisson weights must be integers, got '" + tokens[3] + "'", lineno);
    edges.push_back(e);
  }
  if (edges.empty()) throw ParseError("edge list is empty", lineno > 0 ? lineno : 0);

  std::vector<long> layer_ids, node_ids;
  for (const RawEdge& e : edges) {
    layer_ids.push_back(e.layer);
    node_ids.push_back(e.src);
    node_ids.push_back(e.dst);
  }
  MultilayerData data;
  data.layer_ids = id_range(layer_ids);
  data.node_ids = id_range(node_ids);
  const long layer_base = data.layer_ids.front();
  const long node_base = data.node_ids.front();

  const std::size_t d = data.node_ids.size();
  const std::size_t n = data.layer_ids.size();
  data.tensor = Tensor3(d, d, n);
  for (const RawEdge& e : edges) {
    const auto k = static_cast<std::size_t>(e.layer - layer_base);
    const auto a = static_cast<std::size_t>(e.src - node_base);
    const auto b = static_cast<std::size_t>(e.dst - node_base);
    const double w = family == Family::Bernoulli ? (e.weight > 0.0 ? 1.0 : 0.0) : e.weight;
    data.tensor(a, b, k) = w;
    data.tensor(b, a, k) = w;
  }
  data.lines = edges.size();
  return data;
}

MultilayerData load_multilayer_edge_list(const std::string& path, Family family) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open edge list '" + path + "'");
  return parse_multilayer_edge_list(in, family);
}

}  // namespace mixclust::harness
