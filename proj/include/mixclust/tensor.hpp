#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mixclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense order-3 tensor. Entry (i, j, k) lives at i + d1 * (j + d2 * k), so
// every mode-3 slice T(:, :, k) is a contiguous column-major d1 x d2 block.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t d1, std::size_t d2, std::size_t d3, double fill = 0.0);

  std::size_t dim(int mode) const { return dims_.at(static_cast<std::size_t>(mode - 1)); }
  const std::array<std::size_t, 3>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t layers() const noexcept { return dims_[2]; }

  static constexpr std::size_t linear_index(std::size_t i, std::size_t j, std::size_t k,
                                            std::size_t d1, std::size_t d2) noexcept {
    return i + d1 * (j + d2 * k);
  }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return values_[linear_index(i, j, k, dims_[0], dims_[1])];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return values_[linear_index(i, j, k, dims_[0], dims_[1])];
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  Eigen::Map<const Matrix> slice(std::size_t k) const {
    return {values_.data() + k * dims_[0] * dims_[1], static_cast<Eigen::Index>(dims_[0]),
            static_cast<Eigen::Index>(dims_[1])};
  }
  Eigen::Map<Matrix> slice(std::size_t k) {
    return {values_.data() + k * dims_[0] * dims_[1], static_cast<Eigen::Index>(dims_[0]),
            static_cast<Eigen::Index>(dims_[1])};
  }

  // T(j1, j2, k) == T(j2, j1, k) for every j1, j2 (exact comparison).
  bool slice_symmetric(std::size_t k) const;
  bool all_slices_symmetric() const;

  // Sub-network on `nodes` (applied to modes 1 and 2) and `layers` (mode 3),
  // in the given index order.
  Tensor3 select(std::span<const int> nodes, std::span<const int> layers) const;
  Tensor3 select_layers(std::span<const int> layers) const;

  bool operator==(const Tensor3&) const = default;

 private:
  std::array<std::size_t, 3> dims_{0, 0, 0};
  std::vector<double> values_;
};

// Mode-k unfolding (Kolda-Bader): M_k(T)(i_k, j) with j enumerating the
// remaining indices in increasing mode order, the lowest mode fastest. For
// mode 3 this is M_3(T)(k, i + d1 * j).
Matrix matricize(const Tensor3& t, int mode);

// Inverse of matricize for a tensor of the given dims.
Tensor3 fold(const Matrix& m, int mode, const std::array<std::size_t, 3>& dims);

// result(a, b, c) = sum_{i,j,m} t(i, j, m) u1(i, a) u2(j, b) u3(m, c).
// Each factor has as many rows as the tensor has entries along its mode.
Tensor3 multilinear_product(const Tensor3& t, const Matrix& u1, const Matrix& u2, const Matrix& u3);

// Contract modes 1 and 2 with `u` and leave mode 3 untouched: the per-layer
// projections u^T X_k u.
Tensor3 project_nodes(const Tensor3& t, const Matrix& u);

// Sum of the selected layers (all layers when `layers` is empty and
// `all_when_empty` is set).
Matrix aggregate_layers(const Tensor3& t, std::span<const int> layers);
Matrix aggregate_all_layers(const Tensor3& t);

// Matrix with orthonormal columns, plus the singular values it was cut from.
struct OrthoFactor {
  Matrix basis;
  std::vector<double> singular_values;

  Eigen::Index rows() const noexcept { return basis.rows(); }
  Eigen::Index cols() const noexcept { return basis.cols(); }
  double max_row_norm() const;
  // Number of leading singular values above rel_tol * the largest.
  Eigen::Index numerical_rank(double rel_tol = 1e-10) const;
};

// Top-r left singular vectors. Each column's largest-magnitude entry is made
// non-negative, ties going to the lowest row index.
OrthoFactor top_left_singular_vectors(const Matrix& m, Eigen::Index r);

// Row-clip to norm delta, then re-orthonormalise with a rank-r SVD.
OrthoFactor regularize(const OrthoFactor& u, double delta);

// Row-clipped intermediate of regularize(): U(i,:) * min(delta, |U(i,:)|) / |U(i,:)|.
Matrix clip_rows(const Matrix& u, double delta);

}  // namespace mixclust
