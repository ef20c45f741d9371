#include "mixclust/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixclust/error.hpp"
#include "mixclust/kernels.hpp"

namespace mixclust {
namespace {

constexpr double kSvdRelTol = 1e-10;

void check_mode(int mode) {
  if (mode < 1 || mode > 3) throw ArgumentError("mode must be 1, 2 or 3, got " + std::to_string(mode));
}

void fix_signs(Matrix& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    auto col = basis.col(c);
    const double peak = col.cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    Eigen::Index pick = 0;
    while (std::abs(col(pick)) < peak * (1.0 - 1e-9)) ++pick;
    if (col(pick) < 0.0) col = -col;
  }
}

}  // namespace

Tensor3::Tensor3(std::size_t d1, std::size_t d2, std::size_t d3, double fill)
    : dims_{d1, d2, d3}, values_(d1 * d2 * d3, fill) {}

bool Tensor3::slice_symmetric(std::size_t k) const {
  if (dims_[0] != dims_[1]) return false;
  for (std::size_t j = 0; j < dims_[1]; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if ((*this)(i, j, k) != (*this)(j, i, k)) return false;
  return true;
}

bool Tensor3::all_slices_symmetric() const {
  for (std::size_t k = 0; k < dims_[2]; ++k)
    if (!slice_symmetric(k)) return false;
  return true;
}

Tensor3 Tensor3::select(std::span<const int> nodes, std::span<const int> layers) const {
  Tensor3 out(nodes.size(), nodes.size(), layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto src = static_cast<std::size_t>(layers[k]);
    if (src >= dims_[2]) throw ArgumentError("layer index out of range");
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      for (std::size_t a = 0; a < nodes.size(); ++a) {
        out(a, b, k) = (*this)(static_cast<std::size_t>(nodes[a]), static_cast<std::size_t>(nodes[b]), src);
      }
    }
  }
  return out;
}

Tensor3 Tensor3::select_layers(std::span<const int> layers) const {
  Tensor3 out(dims_[0], dims_[1], layers.size());
  const std::size_t block = dims_[0] * dims_[1];
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto src = static_cast<std::size_t>(layers[k]);
    if (src >= dims_[2]) throw ArgumentError("layer index out of range");
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(src * block), block,
                out.values_.begin() + static_cast<std::ptrdiff_t>(k * block));
  }
  return out;
}

Matrix matricize(const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [d1, d2, d3] = t.dims();
  const auto e = [](std::size_t v) { return static_cast<Eigen::Index>(v); };
  switch (mode) {
    case 1: {
      Matrix m(e(d1), e(d2 * d3));
      for (std::size_t k = 0; k < d3; ++k)
        for (std::size_t j = 0; j < d2; ++j)
          for (std::size_t i = 0; i < d1; ++i) m(e(i), e(j + d2 * k)) = t(i, j, k);
      return m;
    }
    case 2: {
      Matrix m(e(d2), e(d1 * d3));
      for (std::size_t k = 0; k < d3; ++k)
        for (std::size_t j = 0; j < d2; ++j)
          for (std::size_t i = 0; i < d1; ++i) m(e(j), e(i + d1 * k)) = t(i, j, k);
      return m;
    }
    default: {
      Matrix m(e(d3), e(d1 * d2));
      for (std::size_t k = 0; k < d3; ++k)
        for (std::size_t j = 0; j < d2; ++j)
          for (std::size_t i = 0; i < d1; ++i) m(e(k), e(i + d1 * j)) = t(i, j, k);
      return m;
    }
  }
}

Tensor3 fold(const Matrix& m, int mode, const std::array<std::size_t, 3>& dims) {
  check_mode(mode);
  const auto [d1, d2, d3] = dims;
  const std::size_t rows = dims[static_cast<std::size_t>(mode - 1)];
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) * rows != d1 * d2 * d3) {
    throw ShapeError("fold: matrix shape does not match tensor dims");
  }
  const auto e = [](std::size_t v) { return static_cast<Eigen::Index>(v); };
  Tensor3 t(d1, d2, d3);
  for (std::size_t k = 0; k < d3; ++k)
    for (std::size_t j = 0; j < d2; ++j)
      for (std::size_t i = 0; i < d1; ++i) {
        switch (mode) {
          case 1: t(i, j, k) = m(e(i), e(j + d2 * k)); break;
          case 2: t(i, j, k) = m(e(j), e(i + d1 * k)); break;
          default: t(i, j, k) = m(e(k), e(i + d1 * j)); break;
        }
      }
  return t;
}

Tensor3 project_nodes(const Tensor3& t, const Matrix& u) {
  return multilinear_product(t, u, u, Matrix::Identity(static_cast<Eigen::Index>(t.dim(3)),
                                                       static_cast<Eigen::Index>(t.dim(3))));
}

Tensor3 multilinear_product(const Tensor3& t, const Matrix& u1, const Matrix& u2, const Matrix& u3) {
  const auto [d1, d2, d3] = t.dims();
  if (static_cast<std::size_t>(u1.rows()) != d1 || static_cast<std::size_t>(u2.rows()) != d2 ||
      static_cast<std::size_t>(u3.rows()) != d3) {
    throw ShapeError("multilinear_product: factor rows must match tensor dims (" + std::to_string(d1) + "," +
                     std::to_string(d2) + "," + std::to_string(d3) + ")");
  }
  const auto r1 = static_cast<std::size_t>(u1.cols());
  const auto r2 = static_cast<std::size_t>(u2.cols());
  const auto r3 = static_cast<std::size_t>(u3.cols());

  // Modes 1 and 2, layer by layer.
  Tensor3 inner(r1, r2, d3);
  for (std::size_t k = 0; k < d3; ++k) inner.slice(k).noalias() = u1.transpose() * t.slice(k) * u2;

  const bool identity3 = r3 == d3 && u3.isIdentity(0.0);
  if (identity3) return inner;

  Tensor3 out(r1, r2, r3);
  const std::size_t block = r1 * r2;
  for (std::size_t c = 0; c < r3; ++c) {
    std::span<double> dst = out.values().subspan(c * block, block);
    for (std::size_t k = 0; k < d3; ++k) {
      const double w = u3(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
      if (w == 0.0) continue;
      kernels::axpy(w, inner.values().subspan(k * block, block), dst);
    }
  }
  return out;
}

Matrix aggregate_layers(const Tensor3& t, std::span<const int> layers) {
  const std::size_t block = t.dim(1) * t.dim(2);
  Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(t.dim(1)), static_cast<Eigen::Index>(t.dim(2)));
  std::span<double> dst(acc.data(), block);
  for (int k : layers) {
    if (k < 0 || static_cast<std::size_t>(k) >= t.dim(3)) throw ArgumentError("layer index out of range");
    kernels::axpy(1.0, t.values().subspan(static_cast<std::size_t>(k) * block, block), dst);
  }
  return acc;
}

Matrix aggregate_all_layers(const Tensor3& t) {
  std::vector<int> all(t.dim(3));
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
  return aggregate_layers(t, all);
}

double OrthoFactor::max_row_norm() const {
  return basis.size() == 0 ? 0.0 : basis.rowwise().norm().maxCoeff();
}

Eigen::Index OrthoFactor::numerical_rank(double rel_tol) const {
  if (singular_values.empty() || singular_values.front() <= 0.0) return 0;
  const double cut = rel_tol * singular_values.front();
  Eigen::Index rank = 0;
  for (double s : singular_values)
    if (s > cut) ++rank;
  return rank;
}

OrthoFactor top_left_singular_vectors(const Matrix& m, Eigen::Index r) {
  if (r < 0 || r > std::min(m.rows(), m.cols())) {
    throw ArgumentError("rank " + std::to_string(r) + " exceeds matrix dims " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw NumericError("SVD input contains non-finite entries");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
  OrthoFactor out;
  out.basis = svd.matrixU().leftCols(r);
  fix_signs(out.basis);
  const Vector& s = svd.singularValues();
  out.singular_values.assign(s.data(), s.data() + r);
  return out;
}

Matrix clip_rows(const Matrix& u, double delta) {
  Matrix out = u;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > delta) out.row(i) *= delta / norm;
  }
  return out;
}

OrthoFactor regularize(const OrthoFactor& u, double delta) {
  if (!(delta > 0.0)) throw ArgumentError("regularize: delta must be positive");
  const Matrix clipped = clip_rows(u.basis, delta);
  const Eigen::Index r = u.cols();
  OrthoFactor out = top_left_singular_vectors(clipped, r);
  const Eigen::Index achieved = out.numerical_rank(kSvdRelTol);
  if (achieved < r) {
    throw NumericError("regularize: clipped factor has rank " + std::to_string(achieved) + " < " +
                       std::to_string(r));
  }
  return out;
}

}  // namespace mixclust
