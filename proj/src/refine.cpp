#include "mixclust/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mixclust/error.hpp"
#include "mixclust/kernels.hpp"
#include "mixclust/rng.hpp"

namespace mixclust {
namespace {

Matrix expand_blocks(const Matrix& B, const Labels& sigma) {
  const auto d = static_cast<Eigen::Index>(sigma.size());
  Matrix P(d, d);
  for (Eigen::Index b = 0; b < d; ++b)
    for (Eigen::Index a = 0; a < d; ++a) P(a, b) = B(sigma[static_cast<std::size_t>(a)], sigma[static_cast<std::size_t>(b)]);
  return P;
}

void check_memberships(const Labels& sigma, int K, std::size_t d) {
  if (sigma.size() != d) throw ArgumentError("membership vector length does not match node count");
  for (int s : sigma)
    if (s < 0 || s >= K) throw ArgumentError("membership out of range");
}

}  // namespace

void estimate_block(const Tensor3& layers, const Labels& labels, int m, const Labels& sigma, int K, Family family,
                    BlockEstimate& out, bool include_diagonal, double eps) {
  const std::size_t d = layers.dim(1);
  if (labels.size() != layers.dim(3)) throw ArgumentError("label vector length does not match layer count");
  check_memberships(sigma, K, d);
  out.family = family;
  Matrix sums = Matrix::Zero(K, K);
  Matrix slots = Matrix::Zero(K, K);
  double layer_count = 0;
  Matrix cluster_sum = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::span<double> acc(cluster_sum.data(), d * d);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != m) continue;
    kernels::axpy(1.0, layers.values().subspan(i * d * d, d * d), acc);
    layer_count += 1;
  }
  if (layer_count == 0) throw DegeneracyError("layer cluster " + std::to_string(m + 1) + " is empty");
  for (std::size_t b = 0; b < d; ++b) {
    const std::size_t end = include_diagonal ? b + 1 : b;
    for (std::size_t a = 0; a < end; ++a) {
      int k = sigma[a], l = sigma[b];
      if (k > l) std::swap(k, l);
      sums(k, l) += cluster_sum(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      slots(k, l) += layer_count;
    }
  }
  const double total_slots = slots.sum();
  const double global = total_slots > 0 ? sums.sum() / total_slots : 0.0;
  Matrix B(K, K);
  for (int k = 0; k < K; ++k) {
    for (int l = k; l < K; ++l) {
      double v;
      if (slots(k, l) > 0) {
        v = sums(k, l) / slots(k, l);
      } else {
        v = global;
        out.flags.push_back("cluster " + std::to_string(m + 1) + " block (" + std::to_string(k + 1) + "," +
                            std::to_string(l + 1) + ") has no node pairs; filled with the cluster mean");
      }
      v = family == Family::Bernoulli ? std::clamp(v, eps, 1.0 - eps) : std::max(v, eps);
      B(k, l) = B(l, k) = v;
      sums(l, k) = sums(k, l);
      slots(l, k) = slots(k, l);
    }
  }
  out.B[m] = std::move(B);
  out.edge_sums[m] = std::move(sums);
  out.slot_counts[m] = std::move(slots);
}

BlockEstimate estimate_blocks(const Tensor3& layers, const Labels& labels, const Labels& sigma1, const Labels& sigma2,
                              int K, Family family, bool include_diagonal, double eps) {
  BlockEstimate out;
  estimate_block(layers, labels, 0, sigma1, K, family, out, include_diagonal, eps);
  estimate_block(layers, labels, 1, sigma2, K, family, out, include_diagonal, eps);
  return out;
}

PairLogLikelihood::PairLogLikelihood(const Matrix& P, Family family, bool include_diagonal)
    : coef_(P.rows(), P.cols()), include_diagonal_(include_diagonal) {
  if (P.rows() != P.cols()) throw ShapeError("edge matrix must be square");
  const Eigen::Index d = P.rows();
  for (Eigen::Index b = 0; b < d; ++b) {
    const Eigen::Index end = include_diagonal ? b + 1 : b;
    for (Eigen::Index a = 0; a < d; ++a) {
      const double p = P(a, b);
      if (family == Family::Bernoulli) {
        coef_(a, b) = std::log(p) - std::log1p(-p);
        if (a < end) constant_ += std::log1p(-p);
      } else {
        coef_(a, b) = std::log(p);
        if (p == 0.0) has_zero_intensity_ = true;
        if (a < end) constant_ -= p;
      }
    }
  }
}

double PairLogLikelihood::operator()(const Eigen::Ref<const Matrix>& x) const {
  const Eigen::Index d = coef_.rows();
  if (x.rows() != d || x.cols() != d) throw ShapeError("layer size does not match edge matrix");
  double acc = constant_;
  for (Eigen::Index b = 0; b < d; ++b) {
    const auto len = static_cast<std::size_t>(include_diagonal_ ? b + 1 : b);
    if (len == 0) continue;
    if (has_zero_intensity_) {
      for (std::size_t a = 0; a < len; ++a) {
        const double xv = x(static_cast<Eigen::Index>(a), b);
        if (xv == 0.0) continue;
        acc += xv * coef_(static_cast<Eigen::Index>(a), b);
      }
    } else {
      acc += kernels::dot({x.col(b).data(), len}, {coef_.col(b).data(), len});
    }
  }
  return acc;
}

LayerClassifier::LayerClassifier(const Matrix& P1, const Matrix& P2, Family family, bool include_diagonal)
    : ll_{PairLogLikelihood(P1, family, include_diagonal), PairLogLikelihood(P2, family, include_diagonal)} {}

LayerClassifier::LayerClassifier(const BlockEstimate& blocks, const Labels& sigma1, const Labels& sigma2,
                                 bool include_diagonal)
    : LayerClassifier(expand_blocks(blocks.B[0], sigma1), expand_blocks(blocks.B[1], sigma2), blocks.family,
                      include_diagonal) {}

LabelDecision LayerClassifier::classify(const Eigen::Ref<const Matrix>& x) const {
  const double l1 = ll_[0](x);
  const double l2 = ll_[1](x);
  if (l2 > l1) return {1, l2 - l1};
  // l1 == l2 == -inf leaves a zero margin.
  return {0, l1 == l2 ? 0.0 : l1 - l2};
}

int oracle_label_bernoulli(const Eigen::Ref<const Matrix>& x, const EdgeMatrix& P1, const EdgeMatrix& P2,
                           bool include_diagonal) {
  for (const EdgeMatrix* P : {&P1, &P2}) {
    const Matrix& v = P->values();
    if ((v.array() <= 0.0).any() || (v.array() >= 1.0).any()) {
      throw DomainError("oracle Bernoulli classifier needs edge probabilities strictly inside (0, 1)");
    }
  }
  return LayerClassifier(P1.values(), P2.values(), Family::Bernoulli, include_diagonal).classify(x).label;
}

int oracle_label_poisson(const Eigen::Ref<const Matrix>& x, const EdgeMatrix& P1, const EdgeMatrix& P2,
                         bool include_diagonal) {
  for (const EdgeMatrix* P : {&P1, &P2}) {
    if ((P->values().array() < 0.0).any()) throw DomainError("Poisson intensities must be nonnegative");
  }
  return LayerClassifier(P1.values(), P2.values(), Family::Poisson, include_diagonal).classify(x).label;
}

LabelDecision refine_label(const Eigen::Ref<const Matrix>& x, const BlockEstimate& blocks, const Labels& sigma1,
                           const Labels& sigma2, bool include_diagonal) {
  return LayerClassifier(blocks, sigma1, sigma2, include_diagonal).classify(x);
}

RefineResult refine_with_init(const Tensor3& layers, const InitResult& init, int K, Family family,
                              const RefineOptions& options) {
  RefineResult out;
  out.blocks = estimate_blocks(layers, init.layer_labels, init.sigma1, init.sigma2, K, family, options.include_diagonal);
  const LayerClassifier classifier(out.blocks, init.sigma1, init.sigma2, options.include_diagonal);
  const std::size_t n = layers.dim(3);
  out.labels.resize(n);
  out.margins.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const LabelDecision dec = classifier.classify(layers.slice(i));
    out.labels[i] = dec.label;
    out.margins[i] = dec.margin;
  }
  out.flags = out.blocks.flags;
  for (const auto& f : init.diagnostics.flags) out.flags.push_back("init: " + f);
  out.init_used = init;
  return out;
}

RefineResult two_stage_practical(const Tensor3& layers, int K, Family family, std::uint64_t seed,
                                 const RefineOptions& options) {
  if (layers.dim(3) < 2) throw ArgumentError("two_stage_practical needs at least two layers");
  const InitResult init = initialize(options.init, layers, K, seed, options.init_options);
  return refine_with_init(layers, init, K, family, options);
}

RefineResult two_stage_loo(const Tensor3& layers, int K, Family family, std::uint64_t seed,
                           const RefineOptions& options, const Initializer& initializer) {
  const std::size_t n = layers.dim(3);
  if (n < 3) throw ArgumentError("two_stage_loo needs at least three layers");
  const Initializer init_fn = initializer ? initializer : Initializer([&](const Tensor3& sub, std::uint64_t s) {
    return initialize(options.init, sub, K, s, options.init_options);
  });

  RefineResult out;
  out.margins.assign(n, 0.0);
  std::vector<Labels> per_i(n);
  std::optional<RefineResult> practical;

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> others;
    others.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(static_cast<int>(j));
    try {
      const Tensor3 sub = layers.select_layers(others);
      const InitResult init = init_fn(sub, derive_seed(seed, i));
      const BlockEstimate blocks = estimate_blocks(sub, init.layer_labels, init.sigma1, init.sigma2, K, family,
                                                   options.include_diagonal);
      const LabelDecision dec = refine_label(layers.slice(i), blocks, init.sigma1, init.sigma2, options.include_diagonal);
      Labels full(n);
      for (std::size_t p = 0; p < others.size(); ++p) full[static_cast<std::size_t>(others[p])] = init.layer_labels[p];
      full[i] = dec.label;
      per_i[i] = std::move(full);
      out.margins[i] = dec.margin;
      if (i == 0) {
        out.init_used = init;
        out.blocks = blocks;
      }
    } catch (const DegeneracyError& e) {
      if (!practical) practical = two_stage_practical(layers, K, family, seed, options);
      per_i[i] = practical->labels;
      out.margins[i] = practical->margins[i];
      out.flags.push_back("layer " + std::to_string(i + 1) + ": " + e.what() + "; used the practical label");
      if (i == 0) {
        out.init_used = practical->init_used;
        out.blocks = practical->blocks;
      }
    }
  }

  out.labels = consensus_align(per_i, &out.alignment_bijective);
  return out;
}

}  // namespace mixclust
