#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mixclust/models.hpp"
#include "mixclust/tensor.hpp"

namespace mixclust::harness {

struct MultilayerData {
  Tensor3 tensor;  // nodes x nodes x layers, symmetric slices
  // Original id of tensor index j / layer k.
  std::vector<long> node_ids;
  std::vector<long> layer_ids;
  std::size_t lines = 0;
};

// Whitespace-separated `layer src dst [weight]` lines; '#' starts a comment.
// Layer and node ids are auto-detected as 0-based when their minimum is 0,
// 1-based otherwise. Edges are mirrored. Bernoulli data keeps presence only;
// Poisson weights must be nonnegative integers. A repeated pair overwrites.
MultilayerData parse_multilayer_edge_list(std::istream& in, Family family);
MultilayerData load_multilayer_edge_list(const std::string& path, Family family);

}  // namespace mixclust::harness
