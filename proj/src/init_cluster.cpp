#include "mixclust/init_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "mixclust/error.hpp"
#include "mixclust/rng.hpp"

namespace mixclust {
namespace {

constexpr double kNullRelTol = 1e-10;

// Sub-seed tags so that the stages of one initializer draw independent streams.
enum : std::uint64_t { kLayerStream = 11, kNodeStream = 12, kSplitStream = 13, kHalfStream = 20 };

int resolve_rank(const InitOptions& options, int K, std::size_t nodes) {
  const int r = options.rank > 0 ? options.rank : 2 * K;
  if (static_cast<std::size_t>(r) > nodes) {
    if (options.rank > 0) throw ArgumentError("rank " + std::to_string(r) + " exceeds node count " + std::to_string(nodes));
    return static_cast<int>(nodes);
  }
  return r;
}

double resolve_delta(const InitOptions& options, int r, std::size_t layers) {
  if (options.delta1 > 0.0) return options.delta1;
  return options.c0 * std::sqrt(static_cast<double>(r) / static_cast<double>(std::max<std::size_t>(layers, 1)));
}

// K-means (k = 2) on rows of SVD_2 of a layer embedding matrix. Directions
// with numerically zero singular value are dropped before clustering.
Labels cluster_layer_rows(const Matrix& m3, std::uint64_t seed, const KMeansOptions& options, InitDiagnostics& diag) {
  const Eigen::Index n = m3.rows();
  if (n < 2) {
    diag.flags.emplace_back("fewer than two layers; all layers placed in one cluster");
    return Labels(static_cast<std::size_t>(n), 0);
  }
  const Eigen::Index r = std::min<Eigen::Index>({3, n, m3.cols()});
  const OrthoFactor w = top_left_singular_vectors(m3, r);
  if (r >= 3) diag.singular_gaps.push_back(w.singular_values[1] - w.singular_values[2]);
  const Eigen::Index keep = std::min<Eigen::Index>(2, w.numerical_rank(kNullRelTol));
  if (keep == 0) {
    diag.flags.emplace_back("mode-3 unfolding is zero; all layers placed in one cluster");
    return Labels(static_cast<std::size_t>(n), 0);
  }
  const Matrix rows = w.basis.leftCols(keep);
  const double spread = (rows.rowwise() - rows.colwise().mean()).rowwise().norm().maxCoeff();
  if (spread <= kNullRelTol * rows.rowwise().norm().maxCoeff()) {
    diag.flags.emplace_back("layer embeddings coincide; all layers placed in one cluster");
    return Labels(static_cast<std::size_t>(n), 0);
  }
  Labels labels = kmeans(rows, 2, seed, options).labels;
  if (std::count(labels.begin(), labels.end(), 0) == 0 || std::count(labels.begin(), labels.end(), 1) == 0) {
    diag.flags.emplace_back("layer clustering produced a single cluster");
  }
  return labels;
}

Labels cluster_node_rows(const Matrix& aggregate, int K, std::uint64_t seed, const KMeansOptions& options) {
  if (aggregate.rows() < K) throw ArgumentError("fewer nodes than communities");
  const OrthoFactor v = top_left_singular_vectors(aggregate, K);
  return kmeans(v.basis, K, seed, options).labels;
}

int distinct(const Labels& labels, int k) {
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (int l : labels) seen[static_cast<std::size_t>(l)] = true;
  return static_cast<int>(std::count(seen.begin(), seen.end(), true));
}

template <class T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<int>& idx) {
  std::vector<T> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[static_cast<std::size_t>(idx[i])];
  return out;
}

}  // namespace

SplitPlan SplitPlan::make(std::size_t layers, std::size_t nodes, std::uint64_t seed) {
  SplitPlan plan;
  plan.seed = seed;
  Rng rng = make_rng(seed, kSplitStream);
  const auto halve = [&rng](std::size_t count, std::vector<int>* halves) {
    std::vector<int> idx(count);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t first = count / 2;
    halves[0].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(first));
    halves[1].assign(idx.begin() + static_cast<std::ptrdiff_t>(first), idx.end());
    std::sort(halves[0].begin(), halves[0].end());
    std::sort(halves[1].begin(), halves[1].end());
  };
  halve(layers, plan.layer_halves);
  halve(nodes, plan.node_halves);
  return plan;
}

void SplitPlan::validate(std::size_t layers, std::size_t nodes) const {
  const auto check = [](const std::vector<int>* halves, std::size_t count, const char* what) {
    std::vector<int> seen(count, 0);
    for (int h = 0; h < 2; ++h)
      for (int v : halves[h]) {
        if (v < 0 || static_cast<std::size_t>(v) >= count) throw ArgumentError(std::string(what) + " index out of range");
        ++seen[static_cast<std::size_t>(v)];
      }
    if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }))
      throw ArgumentError(std::string(what) + " halves must partition the index set");
    const auto a = halves[0].size(), b = halves[1].size();
    if ((a > b ? a - b : b - a) > 1) throw ArgumentError(std::string(what) + " halves differ in size by more than one");
  };
  check(layer_halves, layers, "layer");
  check(node_halves, nodes, "node");
}

void node_memberships_from_labels(const Tensor3& x, const Labels& layer_labels, int K, std::uint64_t seed,
                                  const KMeansOptions& options, InitResult& out) {
  const std::size_t d = x.dim(1);
  for (int m = 0; m < 2; ++m) {
    std::vector<int> members;
    for (std::size_t i = 0; i < layer_labels.size(); ++i)
      if (layer_labels[i] == m) members.push_back(static_cast<int>(i));
    Labels& sigma = m == 0 ? out.sigma1 : out.sigma2;
    if (members.empty()) {
      sigma.assign(d, 0);
      out.diagnostics.flags.push_back("layer cluster " + std::to_string(m + 1) + " is empty; memberships left trivial");
      continue;
    }
    sigma = cluster_node_rows(aggregate_layers(x, members), K, derive_seed(seed, kNodeStream + 100u * static_cast<unsigned>(m)), options);
  }
}

InitResult rspec(const Tensor3& x, int K, std::uint64_t seed, const InitOptions& options) {
  if (K < 1) throw ArgumentError("K must be positive");
  if (x.dim(1) != x.dim(2)) throw ShapeError("rspec: layers must be square");
  const std::size_t d = x.dim(1);
  const std::size_t n = x.dim(3);
  InitResult out;
  const int r = resolve_rank(options, K, d);
  out.diagnostics.rank_r = r;
  out.diagnostics.delta1 = resolve_delta(options, r, n);

  const Matrix total = aggregate_all_layers(x);
  const Eigen::Index probe = std::min<Eigen::Index>(r + 1, static_cast<Eigen::Index>(d));
  OrthoFactor u = top_left_singular_vectors(total, probe);
  if (probe > r) {
    out.diagnostics.singular_gaps.push_back(u.singular_values[static_cast<std::size_t>(r - 1)] -
                                            u.singular_values[static_cast<std::size_t>(r)]);
    u.basis = u.basis.leftCols(r).eval();
    u.singular_values.resize(static_cast<std::size_t>(r));
  }
  out.diagnostics.max_row_norm = u.max_row_norm();
  const OrthoFactor u_reg = regularize(u, out.diagnostics.delta1);
  const Matrix m3 = matricize(project_nodes(x, u_reg.basis), 3);
  out.layer_labels = cluster_layer_rows(m3, derive_seed(seed, kLayerStream), options.kmeans, out.diagnostics);
  node_memberships_from_labels(x, out.layer_labels, K, seed, options.kmeans, out);
  return out;
}

Labels m3_spectral(const Tensor3& x, std::uint64_t seed, const KMeansOptions& options) {
  InitDiagnostics diag;
  return cluster_layer_rows(matricize(x, 3), derive_seed(seed, kLayerStream), options, diag);
}

InitResult split_init(const Tensor3& x, int K, std::uint64_t seed, const InitOptions& options,
                      const std::optional<SplitPlan>& given_plan) {
  if (K < 1) throw ArgumentError("K must be positive");
  if (x.dim(1) != x.dim(2)) throw ShapeError("split_init: layers must be square");
  const std::size_t d = x.dim(1);
  const std::size_t n = x.dim(3);
  if (n < 4) throw ArgumentError("split_init needs at least 4 layers");
  if (d < static_cast<std::size_t>(4 * K)) throw ArgumentError("split_init needs at least 4K nodes");

  const InitResult reference = rspec(x, K, seed, options);
  const SplitPlan plan = given_plan ? *given_plan : SplitPlan::make(n, d, seed);
  plan.validate(n, d);

  InitResult out;
  out.diagnostics = reference.diagnostics;
  out.layer_labels.assign(n, 0);
  out.sigma1.assign(d, 0);
  out.sigma2.assign(d, 0);
  const double delta = out.diagnostics.delta1;

  for (int k = 0; k < 2; ++k) {
    const int kp = 1 - k;
    const std::vector<int>& nodes_k = plan.node_halves[k];
    const std::vector<int>& nodes_kp = plan.node_halves[kp];
    const std::vector<int>& layers_k = plan.layer_halves[k];
    const std::vector<int>& layers_kp = plan.layer_halves[kp];
    const std::string half = "half " + std::to_string(k);
    const std::uint64_t half_seed = derive_seed(seed, kHalfStream + static_cast<std::uint64_t>(k));

    // Node factor from the other layer half on this node half, so it is
    // independent of the layers being clustered.
    const Tensor3 factor_source = x.select(nodes_k, layers_kp);
    const Eigen::Index r = std::min<Eigen::Index>(out.diagnostics.rank_r, static_cast<Eigen::Index>(nodes_k.size()));
    const OrthoFactor u = top_left_singular_vectors(aggregate_all_layers(factor_source), r);
    const OrthoFactor u_reg = regularize(u, delta);

    const Tensor3 clustered = x.select(nodes_k, layers_k);
    InitDiagnostics half_diag;
    Labels zk = cluster_layer_rows(matricize(project_nodes(clustered, u_reg.basis), 3),
                                   derive_seed(half_seed, kLayerStream), options.kmeans, half_diag);
    if (distinct(zk, 2) < 2) throw DegeneracyError(half + ": layer clustering lost a cluster");
    const Labels ref_k = gather(reference.layer_labels, layers_k);
    zk = apply_permutation(zk, align_labels(ref_k, zk, 2));
    for (std::size_t i = 0; i < layers_k.size(); ++i) out.layer_labels[static_cast<std::size_t>(layers_k[i])] = zk[i];

    // Memberships on the other node half, from this half's layers.
    for (int m = 0; m < 2; ++m) {
      std::vector<int> members;
      for (std::size_t i = 0; i < layers_k.size(); ++i)
        if (zk[i] == m) members.push_back(layers_k[i]);
      if (members.empty()) throw DegeneracyError(half + ": layer cluster " + std::to_string(m + 1) + " is empty");
      const Matrix agg = aggregate_all_layers(x.select(nodes_kp, members));
      Labels sigma_half = cluster_node_rows(agg, K, derive_seed(half_seed, kNodeStream + 100u * static_cast<unsigned>(m)), options.kmeans);
      if (distinct(sigma_half, K) < K) {
        throw DegeneracyError(half + ": node clustering for layer cluster " + std::to_string(m + 1) + " lost a community");
      }
      const Labels ref_sigma = gather(reference.sigma(m), nodes_kp);
      sigma_half = apply_permutation(sigma_half, align_labels(ref_sigma, sigma_half, K));
      Labels& sigma = m == 0 ? out.sigma1 : out.sigma2;
      for (std::size_t j = 0; j < nodes_kp.size(); ++j) sigma[static_cast<std::size_t>(nodes_kp[j])] = sigma_half[j];
    }
    for (auto& f : half_diag.flags) out.diagnostics.flags.push_back(half + ": " + f);
  }
  return out;
}

}  // namespace mixclust

namespace mixclust {

std::string_view init_kind_name(InitKind kind) noexcept {
  switch (kind) {
    case InitKind::Rspec: return "rspec";
    case InitKind::Split: return "split";
    case InitKind::M3sc: return "m3sc";
  }
  return "?";
}

InitKind parse_init_kind(std::string_view name) {
  if (name == "rspec") return InitKind::Rspec;
  if (name == "split") return InitKind::Split;
  if (name == "m3sc") return InitKind::M3sc;
  throw ArgumentError("unknown initializer '" + std::string(name) + "' (expected rspec, split or m3sc)");
}

InitResult initialize(InitKind kind, const Tensor3& x, int K, std::uint64_t seed, const InitOptions& options) {
  switch (kind) {
    case InitKind::Rspec: return rspec(x, K, seed, options);
    case InitKind::Split: return split_init(x, K, seed, options);
    case InitKind::M3sc: {
      InitResult out;
      out.layer_labels = m3_spectral(x, seed, options.kmeans);
      node_memberships_from_labels(x, out.layer_labels, K, seed, options.kmeans, out);
      return out;
    }
  }
  throw ArgumentError("unknown initializer");
}

}  // namespace mixclust
