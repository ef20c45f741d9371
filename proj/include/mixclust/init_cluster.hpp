#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixclust/models.hpp"
#include "mixclust/tensor.hpp"

namespace mixclust {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 100;
  // Restarts whose objective is not better by this relative margin do not
  // replace the incumbent.
  double rel_tol = 1e-6;
};

struct KMeansResult {
  Labels labels;
  Matrix centers;  // k x dim
  double objective = 0.0;  // within-cluster sum of squares
  // Objective after every assignment step of the winning restart.
  std::vector<double> history;
};

// Lloyd iterations from k-means++ seeding, best of `restarts` runs. Points
// tie to the lowest-index center. An empty cluster is re-seeded with the
// point farthest from its center; it stays empty only when every point sits
// exactly on its center. Iteration stops when the assignment is stable.
KMeansResult kmeans(const Matrix& rows, int k, std::uint64_t seed, const KMeansOptions& options = {});

// Permutation perm (perm[c] = reference label for candidate label c) that
// maximises agreement between reference and the relabelled candidate.
// Exhaustive over S_k, ties keep the identity side.
std::vector<int> align_labels(const Labels& reference, const Labels& candidate, int k = 2);
Labels apply_permutation(const Labels& labels, const std::vector<int>& perm);

// Final step of the leave-one-out procedures. per_run[i] is the full label
// vector of run i (run i classified item i itself). Item 0 keeps its label
// from run 0; item i >= 1 gets the run-0 label with the largest overlap with
// {j : per_run[i][j] == per_run[i][i]}, ties to 0. When `bijective` is given,
// it records whether run i's two labels map to distinct run-0 labels.
Labels consensus_align(const std::vector<Labels>& per_run, std::vector<bool>* bijective = nullptr);

struct InitDiagnostics {
  double delta1 = 0.0;
  int rank_r = 0;
  // sigma_r - sigma_{r+1} of the aggregated adjacency and sigma_2 - sigma_3
  // of the mode-3 unfolding (when the next value exists).
  std::vector<double> singular_gaps;
  // Largest row norm of the unregularised node factor.
  double max_row_norm = 0.0;
  std::vector<std::string> flags;

  bool degenerate() const noexcept { return !flags.empty(); }
};

struct InitResult {
  Labels layer_labels;
  Labels sigma1, sigma2;
  InitDiagnostics diagnostics;

  const Labels& sigma(int m) const noexcept { return m == 0 ? sigma1 : sigma2; }
};

struct InitOptions {
  int rank = 0;  // 0 selects 2K
  double c0 = 2.0;
  double delta1 = 0.0;  // 0 selects c0 * sqrt(r / n)
  KMeansOptions kmeans{};
};

// Layer and node halves for the node/sample switching initializer.
struct SplitPlan {
  std::vector<int> layer_halves[2];
  std::vector<int> node_halves[2];
  std::uint64_t seed = 0;

  // Seeded uniform partition; each half has floor or ceil of half the items.
  static SplitPlan make(std::size_t layers, std::size_t nodes, std::uint64_t seed);
  void validate(std::size_t layers, std::size_t nodes) const;
};

// Regularised spectral initialisation.
InitResult rspec(const Tensor3& x, int K, std::uint64_t seed, const InitOptions& options = {});

// Tensor initialisation with node and sample switching; reference labels come
// from rspec on the full tensor.
InitResult split_init(const Tensor3& x, int K, std::uint64_t seed, const InitOptions& options = {},
                      const std::optional<SplitPlan>& plan = std::nullopt);

// K-means (k = 2) on rows of the top-2 left singular vectors of the mode-3
// unfolding.
Labels m3_spectral(const Tensor3& x, std::uint64_t seed, const KMeansOptions& options = {});

// Node memberships per layer cluster: K-means on rows of SVD_K of the layers
// aggregated by label. An empty layer cluster yields all-zero memberships and
// a flag in `diagnostics`.
void node_memberships_from_labels(const Tensor3& x, const Labels& layer_labels, int K, std::uint64_t seed,
                                  const KMeansOptions& options, InitResult& out);

}  // namespace mixclust

namespace mixclust {

enum class InitKind { Rspec, Split, M3sc };

std::string_view init_kind_name(InitKind kind) noexcept;
InitKind parse_init_kind(std::string_view name);

// Runs the named initializer. For M3sc, memberships come from
// node_memberships_from_labels on the M3-SC layer labels.
InitResult initialize(InitKind kind, const Tensor3& x, int K, std::uint64_t seed, const InitOptions& options = {});

}  // namespace mixclust
