#include <doctest.h>

#include <cmath>

#include "doctest_props.hpp"
#include "frozen.hpp"
#include "mixclust/discrete.hpp"
#include "mixclust/error.hpp"
#include "mixclust/metrics.hpp"

using namespace mixclust;

TEST_CASE("binomial MoM on (8, 2), d = 10") {
  const std::vector<long> x{8, 2};
  const MomEstimate e = binomial_mom(x, 10);
  CHECK(std::abs(e.m1 - frozen::kBinomMomM1) < 1e-15);
  CHECK(std::abs(e.m_aux - frozen::kBinomMomM2) < 1e-15);
  CHECK(std::abs(e.param1 - frozen::kBinomMomP1) < 1e-12);
  CHECK(std::abs(e.param2 - frozen::kBinomMomP2) < 1e-12);
  CHECK_FALSE(e.fallback_used);
}

TEST_CASE("binomial MoM on constant samples") {
  const int d = 6;
  for (long c = 0; c <= d; ++c) {
    const std::vector<long> x(5, c);
    const MomEstimate e = binomial_mom(x, d);
    const double want = c * (c - 1.0) / (d * (d - 1.0)) - (c / double(d)) * (c / double(d));
    CHECK(e.discriminant == doctest::Approx(want).epsilon(1e-12));
  }
  const std::vector<long> full(4, 6);
  const MomEstimate top = binomial_mom(full, 6);
  CHECK(top.param1 == 1.0 - kScalarClamp);
  CHECK(top.param2 == 1.0 - kScalarClamp);
  const std::vector<long> zeros(4, 0);
  const MomEstimate bottom = binomial_mom(zeros, 6);
  CHECK(bottom.param1 == kScalarClamp);
  CHECK(bottom.param2 == kScalarClamp);
  CHECK_THROWS_AS(binomial_mom(zeros, 1), ArgumentError);
}

TEST_CASE("Poisson MoM examples") {
  const std::vector<long> a{9, 1};
  const MomEstimate e = poisson_mom(a);
  CHECK(e.m1 == 5.0);
  CHECK(e.m_aux == 2.0);
  CHECK(e.discriminant == frozen::kPoisMom91Disc);
  CHECK(e.param1 == frozen::kPoisMom91Theta1);
  CHECK(e.param2 == frozen::kPoisMom91Theta2);

  const std::vector<long> b{4, 4, 0, 0};
  const MomEstimate f = poisson_mom(b);
  CHECK(f.m1 == 2.0);
  CHECK(f.m_aux == 1.0);
  CHECK(f.param1 == frozen::kPoisMom4400Theta1);
  CHECK(f.param2 == frozen::kPoisMom4400Theta2);

  const std::vector<long> c(3, 7);
  const MomEstimate g = poisson_mom(c);
  CHECK(g.param1 == 7.0);
  CHECK(g.param2 == 7.0);
  CHECK_THROWS_AS(poisson_mom(std::vector<long>{}), ArgumentError);
}

TEST_CASE("negative discriminant falls back to the mean") {
  // Under-dispersed sample: M2 - M1^2 < 0.
  const std::vector<long> x{5, 5, 5, 5, 6};
  const MomEstimate e = binomial_mom(x, 10);
  REQUIRE(e.discriminant < 0.0);
  CHECK(e.fallback_used);
  CHECK(e.param1 == e.param2);
  CHECK(e.param1 == doctest::Approx(e.m1));
}

TEST_CASE("scalar label rule examples") {
  const ScalarComponents bin{ScalarFamily::Binomial, 10, 0.8, 0.2};
  CHECK(scalar_mle_label(9, bin) == 0);
  const ScalarComponents pois{ScalarFamily::Poisson, 1, 9.0, 1.0};
  CHECK(scalar_mle_label(0, pois) == 1);
  const ScalarComponents tie{ScalarFamily::Binomial, 10, 0.4, 0.4};
  for (long x = 0; x <= 10; ++x) CHECK(scalar_mle_label(x, tie) == 0);
  CHECK_THROWS_AS(scalar_mle_label(3, ScalarComponents{ScalarFamily::Binomial, 10, 1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(scalar_mle_label(3, ScalarComponents{ScalarFamily::Poisson, 1, 0.0, 0.5}), DomainError);
}

TEST_CASE("scalar label margin agrees with the frozen log-likelihoods") {
  const double l0 = 9 * std::log(0.8) + std::log(0.2), l1 = 9 * std::log(0.2) + std::log(0.8);
  CHECK(l0 - l1 == doctest::Approx(frozen::kBinomLabelMargin).epsilon(1e-12));
}

TEST_CASE("separable scalar mixtures") {
  for (ScalarMode mode : {ScalarMode::Practical, ScalarMode::LeaveOneOut}) {
    for (ScalarInit init : {ScalarInit::KMeans, ScalarInit::Mom}) {
      const std::vector<long> b{90, 88, 10, 12};
      const auto rb = cluster_scalar_mixture(b, ScalarFamily::Binomial, init, 100, mode, 1);
      CHECK(hamming_rate(rb.labels, {0, 0, 1, 1}, 2) == 0.0);
      const std::vector<long> p{100, 98, 1, 2};
      const auto rp = cluster_scalar_mixture(p, ScalarFamily::Poisson, init, 0, mode, 1);
      CHECK(hamming_rate(rp.labels, {0, 0, 1, 1}, 2) == 0.0);
    }
  }
}

TEST_CASE("identical observations give one flagged cluster") {
  const std::vector<long> x(6, 4);
  for (ScalarMode mode : {ScalarMode::Practical, ScalarMode::LeaveOneOut}) {
    const auto r = cluster_scalar_mixture(x, ScalarFamily::Poisson, ScalarInit::KMeans, 0, mode, 2);
    CHECK(r.labels == Labels(6, 0));
    CHECK(r.fallback_used);
    CHECK_FALSE(r.flags.empty());
  }
}

TEST_CASE("scalar clustering preconditions") {
  const std::vector<long> x{1, 2};
  CHECK_THROWS_AS(cluster_scalar_mixture(x, ScalarFamily::Poisson, ScalarInit::Mom, 0, ScalarMode::LeaveOneOut, 1),
                  ArgumentError);
  const std::vector<long> y{1, 2, 11};
  CHECK_THROWS_AS(cluster_scalar_mixture(y, ScalarFamily::Binomial, ScalarInit::Mom, 10, ScalarMode::Practical, 1),
                  ArgumentError);
  CHECK(parse_scalar_init("mom") == ScalarInit::Mom);
  CHECK_THROWS_AS(parse_scalar_init("em"), ArgumentError);
}

TEST_CASE("discrete properties") {
  CHECK_PROPERTY(poisson_mom_two_point);
  CHECK_PROPERTY(scalar_label_matches_lgamma);
  CHECK_PROPERTY(consensus_swap_invariance);
  CHECK_PROPERTY(scalar_rate_monte_carlo);
  CHECK_PROPERTY(mom_clamp_bounds);
}
