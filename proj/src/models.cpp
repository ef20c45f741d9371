#include "mixclust/models.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mixclust/error.hpp"
#include "mixclust/rng.hpp"

namespace mixclust {
namespace {

void check_labels(const Labels& labels, int k, const char* what, bool require_all) {
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int v : labels) {
    if (v < 0 || v >= k) throw ArgumentError(std::string(what) + ": label " + std::to_string(v) + " out of range");
    ++counts[static_cast<std::size_t>(v)];
  }
  if (require_all) {
    for (int c : counts)
      if (c == 0) throw ArgumentError(std::string(what) + ": a cluster is empty");
  }
}

void check_block(const Matrix& B, int K, Family family, const char* what) {
  if (B.rows() != K || B.cols() != K) throw ArgumentError(std::string(what) + " must be K x K");
  if (B != B.transpose()) throw ArgumentError(std::string(what) + " must be symmetric");
  for (Eigen::Index i = 0; i < B.size(); ++i) {
    const double v = B.data()[i];
    if (family == Family::Bernoulli && !(v >= 0.0 && v <= 1.0))
      throw ArgumentError(std::string(what) + ": Bernoulli entries must lie in [0, 1]");
    if (family == Family::Poisson && !(v >= 0.0 && std::isfinite(v)))
      throw ArgumentError(std::string(what) + ": Poisson intensities must be nonnegative");
  }
}

template <class Term>
double pair_sum(const EdgeMatrix& P1, const EdgeMatrix& P2, bool include_diagonal, Term term) {
  if (P1.d() != P2.d()) throw ShapeError("divergence: edge matrices differ in size");
  double acc = 0.0;
  for (Eigen::Index b = 0; b < P1.d(); ++b) {
    const Eigen::Index end = include_diagonal ? b + 1 : b;
    for (Eigen::Index a = 0; a < end; ++a) acc += term(P1(a, b), P2(a, b));
  }
  return acc;
}

double bernoulli_affinity_term(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw DomainError("Renyi-1/2 divergence needs probabilities strictly inside (0, 1)");
  }
  return -2.0 * std::log(std::sqrt(p * q) + std::sqrt((1.0 - p) * (1.0 - q)));
}

double draw_entry(Family family, double mean, Rng& rng) {
  if (family == Family::Bernoulli) {
    return std::generate_canonical<double, 53>(rng) < mean ? 1.0 : 0.0;
  }
  if (mean <= 0.0) return 0.0;
  std::poisson_distribution<long> pois(mean);
  return static_cast<double>(pois(rng));
}

}  // namespace

std::string_view family_name(Family f) noexcept { return f == Family::Bernoulli ? "bernoulli" : "poisson"; }

Family parse_family(std::string_view name) {
  if (name == "bernoulli") return Family::Bernoulli;
  if (name == "poisson") return Family::Poisson;
  throw ArgumentError("unknown family '" + std::string(name) + "' (expected bernoulli or poisson)");
}

EdgeMatrix::EdgeMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw ShapeError("edge matrix must be square");
  if (values_ != values_.transpose()) throw ArgumentError("edge matrix must be symmetric");
}

EdgeMatrix EdgeMatrix::constant(Eigen::Index d, double value) { return EdgeMatrix(Matrix::Constant(d, d, value)); }

void MixtureBlockParams::validate() const {
  if (K < 1) throw ArgumentError("K must be positive");
  if (sigma1.size() != sigma2.size()) throw ArgumentError("sigma1 and sigma2 must cover the same nodes");
  check_labels(z_star, 2, "z_star", true);
  check_labels(sigma1, K, "sigma1", true);
  check_labels(sigma2, K, "sigma2", true);
  check_block(B1, K, family, "B1");
  check_block(B2, K, family, "B2");
}

void ScalarMixtureParams::validate() const {
  check_labels(z_star, 2, "z_star", false);
  if (family == ScalarFamily::Binomial) {
    if (trials < 1) throw ArgumentError("Binomial trials must be positive");
    if (!(param1 >= 0.0 && param1 <= 1.0 && param2 >= 0.0 && param2 <= 1.0))
      throw ArgumentError("Binomial probabilities must lie in [0, 1]");
  } else if (!(param1 >= 0.0 && param2 >= 0.0 && std::isfinite(param1) && std::isfinite(param2))) {
    throw ArgumentError("Poisson intensities must be nonnegative");
  }
}

EdgeMatrix edge_matrix(const Matrix& B, const Labels& sigma) {
  const auto d = static_cast<Eigen::Index>(sigma.size());
  for (int s : sigma)
    if (s < 0 || s >= B.rows()) throw ArgumentError("membership " + std::to_string(s) + " out of range");
  Matrix P(d, d);
  for (Eigen::Index b = 0; b < d; ++b)
    for (Eigen::Index a = 0; a < d; ++a) P(a, b) = B(sigma[static_cast<std::size_t>(a)], sigma[static_cast<std::size_t>(b)]);
  return EdgeMatrix(std::move(P));
}

Tensor3 sample_mixture_network(const MixtureBlockParams& params, std::uint64_t seed, bool include_diagonal) {
  params.validate();
  const std::size_t d = params.nodes();
  const std::size_t n = params.layers();
  const EdgeMatrix P[2] = {edge_matrix(params.B1, params.sigma1), edge_matrix(params.B2, params.sigma2)};
  Tensor3 out(d, d, n);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng = make_rng(seed, k);
    const EdgeMatrix& Pk = P[params.z_star[k]];
    for (std::size_t b = 0; b < d; ++b) {
      for (std::size_t a = 0; a <= b; ++a) {
        const double v = draw_entry(params.family, Pk(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), rng);
        if (a == b && !include_diagonal) continue;
        out(a, b, k) = v;
        out(b, a, k) = v;
      }
    }
  }
  return out;
}

std::vector<long> sample_scalar_mixture(const ScalarMixtureParams& params, std::uint64_t seed) {
  params.validate();
  std::vector<long> x(params.n());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Rng rng = make_rng(seed, i);
    const double param = params.z_star[i] == 0 ? params.param1 : params.param2;
    if (params.family == ScalarFamily::Binomial) {
      if (param >= 1.0) {
        x[i] = params.trials;
      } else if (param <= 0.0) {
        x[i] = 0;
      } else {
        std::binomial_distribution<long> bin(params.trials, param);
        x[i] = bin(rng);
      }
    } else {
      x[i] = param <= 0.0 ? 0 : std::poisson_distribution<long>(param)(rng);
    }
  }
  return x;
}

double renyi_half_bernoulli(const EdgeMatrix& P1, const EdgeMatrix& P2, bool include_diagonal) {
  return pair_sum(P1, P2, include_diagonal, bernoulli_affinity_term);
}

double renyi_half_poisson(const EdgeMatrix& P1, const EdgeMatrix& P2, bool include_diagonal) {
  return pair_sum(P1, P2, include_diagonal, [](double p, double q) {
    if (p < 0.0 || q < 0.0) throw DomainError("Poisson intensities must be nonnegative");
    const double diff = std::sqrt(p) - std::sqrt(q);
    return diff * diff;
  });
}

double renyi_half_binomial(int trials, double p1, double p2) {
  if (trials < 1) throw ArgumentError("Binomial trials must be positive");
  return static_cast<double>(trials) * bernoulli_affinity_term(p1, p2);
}

double renyi_half_poisson_scalar(double theta1, double theta2) {
  if (theta1 < 0.0 || theta2 < 0.0) throw DomainError("Poisson intensities must be nonnegative");
  const double diff = std::sqrt(theta1) - std::sqrt(theta2);
  return diff * diff;
}

Matrix simulation_block_matrix(int K, double p, double alpha) {
  if (K < 1) throw ArgumentError("K must be positive");
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("p must lie in (0, 1)");
  const double q = alpha * p;
  if (!(q >= 0.0 && q < 1.0)) throw ArgumentError("alpha * p must lie in [0, 1)");
  Matrix B = Matrix::Constant(K, K, q);
  B.diagonal().setConstant(p);
  return B;
}

MixtureBlockParams simulation_params(std::size_t layers, std::size_t nodes, int K, const Matrix& B,
                                     std::uint64_t seed, Family family) {
  if (layers < 2) throw ArgumentError("need at least two layers");
  if (nodes < static_cast<std::size_t>(K)) throw ArgumentError("need at least K nodes");
  MixtureBlockParams params;
  params.family = family;
  params.K = K;
  params.B1 = B;
  params.B2 = B;
  Rng rng = make_rng(seed, 0x5eed);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> community(0, K - 1);
  const auto all_present = [](const Labels& v, int k) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (int x : v) seen[static_cast<std::size_t>(x)] = true;
    for (bool s : seen)
      if (!s) return false;
    return true;
  };
  do {
    params.z_star.assign(layers, 0);
    for (int& z : params.z_star) z = coin(rng);
  } while (!all_present(params.z_star, 2));
  for (Labels* sigma : {&params.sigma1, &params.sigma2}) {
    do {
      sigma->assign(nodes, 0);
      for (int& s : *sigma) s = community(rng);
    } while (!all_present(*sigma, K));
  }
  params.validate();
  return params;
}

}  // namespace mixclust
