#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mixclust/init_cluster.hpp"
#include "mixclust/models.hpp"
#include "mixclust/tensor.hpp"

namespace mixclust {

inline constexpr double kBlockClamp = 1e-6;

// Estimated block matrices for both layer clusters.
struct BlockEstimate {
  Family family = Family::Bernoulli;
  Matrix B[2];
  // Edge totals and slot counts behind each ratio (unordered community pairs,
  // stored symmetrically).
  Matrix edge_sums[2];
  Matrix slot_counts[2];
  std::vector<std::string> flags;

  const Matrix& B1() const noexcept { return B[0]; }
  const Matrix& B2() const noexcept { return B[1]; }
};

// Ratio estimate of one cluster's block matrix from the layers labelled `m`,
// summing over node pairs j1 <= j2. Empty blocks take the cluster's overall
// mean (flagged); entries are clamped to [eps, 1 - eps] (Bernoulli) or
// [eps, inf) (Poisson). Throws DegeneracyError when no layer has label m.
void estimate_block(const Tensor3& layers, const Labels& labels, int m, const Labels& sigma, int K, Family family,
                    BlockEstimate& out, bool include_diagonal = true, double eps = kBlockClamp);

BlockEstimate estimate_blocks(const Tensor3& layers, const Labels& labels, const Labels& sigma1, const Labels& sigma2,
                              int K, Family family, bool include_diagonal = true, double eps = kBlockClamp);

// Log-likelihood of one layer under a fixed edge matrix, summed over j1 <= j2
// (constant terms in X dropped for Poisson).
class PairLogLikelihood {
 public:
  PairLogLikelihood(const Matrix& P, Family family, bool include_diagonal = true);
  double operator()(const Eigen::Ref<const Matrix>& x) const;

 private:
  Matrix coef_;
  double constant_ = 0.0;
  bool include_diagonal_ = true;
  bool has_zero_intensity_ = false;
};

struct LabelDecision {
  int label = 0;
  double margin = 0.0;  // winning minus losing log-likelihood
};

// Likelihood classifier between two fixed edge matrices; ties go to label 0.
class LayerClassifier {
 public:
  LayerClassifier(const Matrix& P1, const Matrix& P2, Family family, bool include_diagonal = true);
  // Plug-in classifier from estimated blocks: P_m = B_m(sigma_m, sigma_m).
  LayerClassifier(const BlockEstimate& blocks, const Labels& sigma1, const Labels& sigma2, bool include_diagonal = true);

  LabelDecision classify(const Eigen::Ref<const Matrix>& x) const;

 private:
  PairLogLikelihood ll_[2];
};

// Oracle rules with known edge matrices. Bernoulli entries must lie strictly
// inside (0, 1); Poisson intensities must be nonnegative.
int oracle_label_bernoulli(const Eigen::Ref<const Matrix>& x, const EdgeMatrix& P1, const EdgeMatrix& P2,
                           bool include_diagonal = true);
int oracle_label_poisson(const Eigen::Ref<const Matrix>& x, const EdgeMatrix& P1, const EdgeMatrix& P2,
                         bool include_diagonal = true);

LabelDecision refine_label(const Eigen::Ref<const Matrix>& x, const BlockEstimate& blocks, const Labels& sigma1,
                           const Labels& sigma2, bool include_diagonal = true);

struct RefineOptions {
  InitKind init = InitKind::Rspec;
  InitOptions init_options{};
  bool include_diagonal = true;
};

struct RefineResult {
  Labels labels;
  std::vector<double> margins;
  InitResult init_used;
  BlockEstimate blocks;
  std::vector<std::string> flags;
  // Leave-one-out only: whether the final alignment maps the labels of run i
  // one-to-one onto those of the reference run.
  std::vector<bool> alignment_bijective;
};

// One initialisation on all layers, one block estimate, one relabelling pass.
RefineResult two_stage_practical(const Tensor3& layers, int K, Family family, std::uint64_t seed,
                                 const RefineOptions& options = {});

// Same, starting from externally supplied labels and memberships.
RefineResult refine_with_init(const Tensor3& layers, const InitResult& init, int K, Family family,
                              const RefineOptions& options = {});

using Initializer = std::function<InitResult(const Tensor3& layers, std::uint64_t seed)>;

// Exact leave-one-out two-stage algorithm: layer i is classified with blocks
// estimated from an initialisation that never saw layer i, then all per-i
// label vectors are aligned to the one from i = 0.
RefineResult two_stage_loo(const Tensor3& layers, int K, Family family, std::uint64_t seed,
                           const RefineOptions& options = {}, const Initializer& initializer = {});

}  // namespace mixclust
