#include <doctest.h>

#include <cmath>
#include <random>

#include "doctest_props.hpp"
#include "frozen.hpp"
#include "mixclust/error.hpp"
#include "mixclust/tensor.hpp"
#include "oracles.hpp"

using namespace mixclust;

TEST_CASE("mode-3 unfolding of the 2x2x2 index tensor") {
  Tensor3 t(2, 2, 2);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) t(i, j, k) = 4.0 * k + 2.0 * j + i;
  const Matrix m = matricize(t, 3);
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 4);
  for (int c = 0; c < 4; ++c) {
    CHECK(m(0, c) == c);
    CHECK(m(1, c) == 4 + c);
  }
}

TEST_CASE("1x1xn mode-3 unfolding is the layer column") {
  Tensor3 t(1, 1, 5);
  for (std::size_t k = 0; k < 5; ++k) t(0, 0, k) = static_cast<double>(k) + 0.5;
  const Matrix m = matricize(t, 3);
  REQUIRE(m.rows() == 5);
  REQUIRE(m.cols() == 1);
  for (int k = 0; k < 5; ++k) CHECK(m(k, 0) == k + 0.5);
}

TEST_CASE("matricize rejects bad modes and fold rejects bad shapes") {
  Tensor3 t(2, 3, 4);
  CHECK_THROWS_AS(matricize(t, 0), ArgumentError);
  CHECK_THROWS_AS(matricize(t, 4), ArgumentError);
  CHECK_THROWS_AS(fold(Matrix::Zero(3, 3), 1, t.dims()), ShapeError);
}

TEST_CASE("rank-one contraction") {
  Vector x(3), y(2), z(4);
  x << 1, -2, 0.5;
  y << 3, 1;
  z << 0.25, 1, -1, 2;
  Tensor3 t(3, 2, 4);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 3; ++i) t(i, j, k) = x(i) * y(j) * z(k);
  const Tensor3 s = multilinear_product(t, x, y, z);
  REQUIRE(s.size() == 1);
  CHECK(s(0, 0, 0) == doctest::Approx(x.squaredNorm() * y.squaredNorm() * z.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("all-ones 2x2x2 contracted with normalised ones") {
  const Tensor3 t(2, 2, 2, 1.0);
  const Matrix u = Matrix::Constant(2, 1, 1.0 / std::sqrt(2.0));
  const Tensor3 s = multilinear_product(t, u, u, u);
  CHECK(std::abs(s(0, 0, 0) - frozen::kContractAllOnes) < 1e-14);
}

TEST_CASE("multilinear_product shape errors") {
  const Tensor3 t(2, 3, 4);
  CHECK_THROWS_AS(multilinear_product(t, Matrix::Identity(3, 3), Matrix::Identity(3, 3), Matrix::Identity(4, 4)),
                  ShapeError);
}

TEST_CASE("project_nodes equals per-layer U^T X U") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n01;
  Tensor3 t(6, 6, 3);
  for (double& v : t.values()) v = n01(g);
  Matrix u(6, 2);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = n01(g);
  const Tensor3 p = project_nodes(t, u);
  for (std::size_t k = 0; k < 3; ++k) {
    const Matrix want = u.transpose() * Matrix(t.slice(k)) * u;
    CHECK((Matrix(p.slice(k)) - want).norm() < 1e-12);
  }
}

TEST_CASE("top singular vectors of diag(3,1)") {
  Matrix m(2, 2);
  m << 3, 0, 0, 1;
  const OrthoFactor f = top_left_singular_vectors(m, 1);
  CHECK(f.basis(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(f.basis(1, 0)) < 1e-15);
  CHECK(f.singular_values.at(0) == doctest::Approx(3.0));
}

TEST_CASE("orthonormal input spans itself") {
  std::mt19937_64 g(8);
  std::normal_distribution<double> n01;
  Matrix a(7, 3);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n01(g);
  const Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(7, 3);
  const OrthoFactor f = top_left_singular_vectors(q, 3);
  CHECK((f.basis * f.basis.transpose() - q * q.transpose()).norm() < 1e-8);
}

TEST_CASE("random 6x4, r = 2 matches the eigen oracle") {
  std::mt19937_64 g(21);
  std::normal_distribution<double> n01;
  Matrix m(6, 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(g);
  const OrthoFactor f = top_left_singular_vectors(m, 2);
  CHECK((f.basis * f.basis.transpose() - oracle::eigen_projector(m, 2)).norm() < 1e-8);
}

TEST_CASE("singular vector errors") {
  CHECK_THROWS_AS(top_left_singular_vectors(Matrix::Identity(3, 2), 3), ArgumentError);
  Matrix bad = Matrix::Identity(3, 3);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(top_left_singular_vectors(bad, 1), NumericError);
}

TEST_CASE("regularize: inactive clipping keeps the subspace") {
  std::mt19937_64 g(4);
  std::normal_distribution<double> n01;
  Matrix a(40, 2);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n01(g);
  const OrthoFactor u = top_left_singular_vectors(a, 2);
  const OrthoFactor out = regularize(u, u.max_row_norm() * 1.01);
  CHECK((out.basis * out.basis.transpose() - u.basis * u.basis.transpose()).norm() < 1e-8);
}

TEST_CASE("regularize: clipped row has norm delta") {
  Matrix u = Matrix::Constant(5, 1, 0.01);
  u(2, 0) = 1.0;
  const Matrix c = clip_rows(u, 0.1);
  CHECK(c.row(2).norm() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(c(0, 0) == 0.01);
}

namespace {

OrthoFactor spiked_basis(double scale) {
  std::mt19937_64 g(50);
  std::normal_distribution<double> n01;
  Matrix a(50, 3);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n01(g);
  a.row(17) *= scale;
  return top_left_singular_vectors(a, 3);
}

double clipped_smin(const OrthoFactor& u, double delta) {
  return Eigen::JacobiSVD<Matrix>(clip_rows(u.basis, delta)).singularValues().minCoeff();
}

}  // namespace

TEST_CASE("regularize: spiked 50x3 stays within sqrt(2) delta") {
  const OrthoFactor u = spiked_basis(8.0);
  const double delta = 2.0 * std::sqrt(3.0 / 50.0);
  REQUIRE(u.max_row_norm() > delta);
  REQUIRE(clipped_smin(u, delta) >= std::sqrt(0.5));
  const OrthoFactor out = regularize(u, delta);
  CHECK(out.max_row_norm() <= std::sqrt(2.0) * delta + 1e-8);
  CHECK((out.basis.transpose() * out.basis - Matrix::Identity(3, 3)).norm() < 1e-8);
}

TEST_CASE("regularize: a dominant row is bounded by delta over the clipped smin") {
  const OrthoFactor u = spiked_basis(40.0);
  const double delta = 2.0 * std::sqrt(3.0 / 50.0);
  const double smin = clipped_smin(u, delta);
  REQUIRE(smin < std::sqrt(0.5));
  const OrthoFactor out = regularize(u, delta);
  CHECK(out.max_row_norm() > std::sqrt(2.0) * delta);
  CHECK(out.max_row_norm() <= delta / smin + 1e-8);
}

TEST_CASE("regularize errors") {
  const OrthoFactor u = top_left_singular_vectors(Matrix::Identity(4, 2), 2);
  CHECK_THROWS_AS(regularize(u, 0.0), ArgumentError);
  OrthoFactor z{Matrix::Zero(4, 2), {0.0, 0.0}};
  CHECK_THROWS_AS(regularize(z, 0.5), NumericError);
}

TEST_CASE("tensor_core properties") {
  CHECK_PROPERTY(matricize_fold_round_trip);
  CHECK_PROPERTY(multilinear_identity_and_additivity);
  CHECK_PROPERTY(svd_orthonormal_and_projector);
  CHECK_PROPERTY(regularize_row_norm_bound);
}
