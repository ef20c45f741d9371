#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixclust/models.hpp"

namespace mixclust {

inline constexpr double kScalarClamp = 1e-9;

// Method-of-moments fit of a two-component scalar mixture.
struct MomEstimate {
  double m1 = 0.0;
  // Second factorial moment (Binomial) or mean square root (Poisson).
  double m_aux = 0.0;
  double param1 = 0.0;  // >= param2
  double param2 = 0.0;
  double discriminant = 0.0;
  bool fallback_used = false;  // negative discriminant, both set to the mean
};

// p = M1 +/- sqrt(M2 - M1^2), clamped to [eps, 1 - eps].
MomEstimate binomial_mom(std::span<const long> x, int trials, double eps = kScalarClamp);
// theta = M1 +/- 2 M_{1/2} sqrt(M1 - M_{1/2}^2).
MomEstimate poisson_mom(std::span<const long> x);

struct ScalarComponents {
  ScalarFamily family = ScalarFamily::Binomial;
  int trials = 1;
  double param1 = 0.5;
  double param2 = 0.5;
};

// Two-label likelihood rule for one observation; ties go to label 0.
// Boundary parameters (p in {0, 1}, theta <= 0) raise DomainError.
int scalar_mle_label(long x, const ScalarComponents& params);

enum class ScalarInit { KMeans, Mom };
enum class ScalarMode { LeaveOneOut, Practical };

ScalarInit parse_scalar_init(std::string_view name);

struct ScalarClusterResult {
  Labels labels;
  ScalarComponents estimate;  // from the full-sample initialisation
  bool fallback_used = false;
  std::vector<std::string> flags;
};

// Mixture clustering: initialise (K-means on the raw values or MoM), estimate
// the two components, relabel by likelihood. LeaveOneOut re-initialises
// without item i before labelling item i and aligns the runs at the end.
ScalarClusterResult cluster_scalar_mixture(std::span<const long> x, ScalarFamily family, ScalarInit init,
                                           int trials, ScalarMode mode, std::uint64_t seed);

}  // namespace mixclust
