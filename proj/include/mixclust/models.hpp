#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mixclust/tensor.hpp"

namespace mixclust {

// Cluster labels are 0-based throughout the library: layer labels take
// values in {0, 1}, node memberships in {0, ..., K-1}.
using Labels = std::vector<int>;

enum class Family { Bernoulli, Poisson };
enum class ScalarFamily { Binomial, Poisson };

std::string_view family_name(Family f) noexcept;
Family parse_family(std::string_view name);

// Symmetric d x d matrix of edge probabilities or intensities.
class EdgeMatrix {
 public:
  EdgeMatrix() = default;
  explicit EdgeMatrix(Matrix values);

  Eigen::Index d() const noexcept { return values_.rows(); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(Eigen::Index a, Eigen::Index b) const { return values_(a, b); }

  static EdgeMatrix constant(Eigen::Index d, double value);

 private:
  Matrix values_;
};

// Two-component mixture of block models sharing K communities per type.
struct MixtureBlockParams {
  Family family = Family::Bernoulli;
  int K = 1;
  Labels z_star;  // per layer, in {0, 1}
  Matrix B1, B2;
  Labels sigma1, sigma2;  // per node, in [0, K)

  std::size_t layers() const noexcept { return z_star.size(); }
  std::size_t nodes() const noexcept { return sigma1.size(); }
  const Matrix& block(int m) const noexcept { return m == 0 ? B1 : B2; }
  const Labels& sigma(int m) const noexcept { return m == 0 ? sigma1 : sigma2; }

  // Throws ArgumentError on any violated invariant.
  void validate() const;
};

struct ScalarMixtureParams {
  ScalarFamily family = ScalarFamily::Binomial;
  int trials = 1;  // Binomial only
  double param1 = 0.5;  // p1 or theta1
  double param2 = 0.5;  // p2 or theta2
  Labels z_star;

  std::size_t n() const noexcept { return z_star.size(); }
  void validate() const;
};

// P(j1, j2) = B(sigma(j1), sigma(j2)).
EdgeMatrix edge_matrix(const Matrix& B, const Labels& sigma);

// Layer i is drawn entrywise on the upper triangle (diagonal included) from
// Bern or Poisson of P_{z*_i}, then mirrored. Layer i uses RNG substream i of
// `seed`. With include_diagonal = false the diagonal is left at zero.
Tensor3 sample_mixture_network(const MixtureBlockParams& params, std::uint64_t seed, bool include_diagonal = true);

std::vector<long> sample_scalar_mixture(const ScalarMixtureParams& params, std::uint64_t seed);

// -2 * sum over j1 <= j2 of log(sqrt(p q) + sqrt((1-p)(1-q))).
double renyi_half_bernoulli(const EdgeMatrix& P1, const EdgeMatrix& P2, bool include_diagonal = true);
// sum over j1 <= j2 of (sqrt(p) - sqrt(q))^2.
double renyi_half_poisson(const EdgeMatrix& P1, const EdgeMatrix& P2, bool include_diagonal = true);
double renyi_half_binomial(int trials, double p1, double p2);
double renyi_half_poisson_scalar(double theta1, double theta2);

// p on the diagonal, alpha * p off it.
Matrix simulation_block_matrix(int K, double p, double alpha);

// Simulation draw: layer types i.i.d. uniform on {0,1}, memberships i.i.d.
// uniform on [K], both redrawn until every cluster is nonempty. B1 = B2 = B.
MixtureBlockParams simulation_params(std::size_t layers, std::size_t nodes, int K, const Matrix& B,
                                     std::uint64_t seed, Family family = Family::Bernoulli);

}  // namespace mixclust
