#include "mixclust/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixclust/error.hpp"
#include "mixclust/init_cluster.hpp"
#include "mixclust/rng.hpp"

namespace mixclust {
namespace {

void check_counts(std::span<const long> x, ScalarFamily family, int trials) {
  if (x.empty()) throw ArgumentError("empty sample");
  for (long v : x) {
    if (v < 0) throw ArgumentError("counts must be nonnegative");
    if (family == ScalarFamily::Binomial && v > trials) throw ArgumentError("Binomial count exceeds the number of trials");
  }
}

double loglik(long x, double param, const ScalarComponents& c) {
  const auto xv = static_cast<double>(x);
  if (c.family == ScalarFamily::Binomial) return xv * std::log(param) + (c.trials - xv) * std::log1p(-param);
  return -param + xv * std::log(param);
}

ScalarComponents clamp_components(ScalarComponents c) {
  if (c.family == ScalarFamily::Binomial) {
    c.param1 = std::clamp(c.param1, kScalarClamp, 1.0 - kScalarClamp);
    c.param2 = std::clamp(c.param2, kScalarClamp, 1.0 - kScalarClamp);
  } else {
    c.param1 = std::max(c.param1, kScalarClamp);
    c.param2 = std::max(c.param2, kScalarClamp);
  }
  return c;
}

struct SubsampleFit {
  Labels labels;  // one per item of the subsample
  ScalarComponents components;
  bool fallback = false;
  std::string note;
};

ScalarComponents from_mom(const MomEstimate& mom, ScalarFamily family, int trials) {
  return clamp_components({family, trials, mom.param1, mom.param2});
}

MomEstimate run_mom(std::span<const long> x, ScalarFamily family, int trials) {
  return family == ScalarFamily::Binomial ? binomial_mom(x, trials) : poisson_mom(x);
}

Labels label_all(std::span<const long> x, const ScalarComponents& c) {
  Labels out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scalar_mle_label(x[i], c);
  return out;
}

SubsampleFit fit_subsample(std::span<const long> y, ScalarFamily family, ScalarInit init, int trials,
                           std::uint64_t seed, const ScalarComponents& global_fallback) {
  SubsampleFit fit;
  if (init == ScalarInit::Mom) {
    const MomEstimate mom = run_mom(y, family, trials);
    fit.components = from_mom(mom, family, trials);
    fit.fallback = mom.fallback_used;
    if (mom.fallback_used) fit.note = "negative moment discriminant";
    fit.labels = label_all(y, fit.components);
    return fit;
  }
  Matrix rows(static_cast<Eigen::Index>(y.size()), 1);
  for (std::size_t i = 0; i < y.size(); ++i) rows(static_cast<Eigen::Index>(i), 0) = static_cast<double>(y[i]);
  Labels labels = y.size() >= 2 ? kmeans(rows, 2, seed).labels : Labels(y.size(), 0);
  double sums[2] = {0, 0};
  double counts[2] = {0, 0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    sums[labels[i]] += static_cast<double>(y[i]);
    counts[labels[i]] += 1;
  }
  if (counts[0] == 0 || counts[1] == 0) {
    fit.components = global_fallback;
    fit.fallback = true;
    fit.note = "K-means left a cluster empty; used moment estimates of the full sample";
    fit.labels = label_all(y, fit.components);
    return fit;
  }
  double mean[2] = {sums[0] / counts[0], sums[1] / counts[1]};
  if (mean[1] > mean[0]) {
    std::swap(mean[0], mean[1]);
    for (int& l : labels) l = 1 - l;
  }
  const double scale = family == ScalarFamily::Binomial ? trials : 1.0;
  fit.components = clamp_components({family, trials, mean[0] / scale, mean[1] / scale});
  fit.labels = std::move(labels);
  return fit;
}

}  // namespace

MomEstimate binomial_mom(std::span<const long> x, int trials, double eps) {
  if (trials < 2) throw ArgumentError("binomial_mom needs at least two trials");
  check_counts(x, ScalarFamily::Binomial, trials);
  const double n = static_cast<double>(x.size());
  const double d = trials;
  double s1 = 0.0, s2 = 0.0;
  for (long v : x) {
    const auto xv = static_cast<double>(v);
    s1 += xv;
    s2 += xv * xv - xv;
  }
  MomEstimate out;
  out.m1 = s1 / (n * d);
  out.m_aux = s2 / (n * d * (d - 1.0));
  out.discriminant = out.m_aux - out.m1 * out.m1;
  if (out.discriminant < 0.0) {
    out.fallback_used = true;
    out.param1 = out.param2 = out.m1;
  } else {
    const double root = std::sqrt(out.discriminant);
    out.param1 = out.m1 + root;
    out.param2 = out.m1 - root;
  }
  out.param1 = std::clamp(out.param1, eps, 1.0 - eps);
  out.param2 = std::clamp(out.param2, eps, 1.0 - eps);
  return out;
}

MomEstimate poisson_mom(std::span<const long> x) {
  check_counts(x, ScalarFamily::Poisson, 0);
  const double n = static_cast<double>(x.size());
  double s1 = 0.0, s_half = 0.0;
  for (long v : x) {
    s1 += static_cast<double>(v);
    s_half += std::sqrt(static_cast<double>(v));
  }
  MomEstimate out;
  out.m1 = s1 / n;
  out.m_aux = s_half / n;
  out.discriminant = out.m1 - out.m_aux * out.m_aux;
  if (out.discriminant < 0.0) {
    out.fallback_used = true;
    out.param1 = out.param2 = out.m1;
  } else {
    const double spread = 2.0 * out.m_aux * std::sqrt(out.discriminant);
    out.param1 = out.m1 + spread;
    out.param2 = std::max(0.0, out.m1 - spread);
  }
  return out;
}

int scalar_mle_label(long x, const ScalarComponents& params) {
  if (params.family == ScalarFamily::Binomial) {
    if (!(params.param1 > 0.0 && params.param1 < 1.0 && params.param2 > 0.0 && params.param2 < 1.0))
      throw DomainError("Binomial label rule needs probabilities strictly inside (0, 1)");
  } else if (!(params.param1 > 0.0 && params.param2 > 0.0)) {
    throw DomainError("Poisson label rule needs positive intensities");
  }
  return loglik(x, params.param2, params) > loglik(x, params.param1, params) ? 1 : 0;
}

ScalarInit parse_scalar_init(std::string_view name) {
  if (name == "kmeans") return ScalarInit::KMeans;
  if (name == "mom") return ScalarInit::Mom;
  throw ArgumentError("unknown scalar initializer '" + std::string(name) + "' (expected kmeans or mom)");
}

ScalarClusterResult cluster_scalar_mixture(std::span<const long> x, ScalarFamily family, ScalarInit init,
                                           int trials, ScalarMode mode, std::uint64_t seed) {
  if (family == ScalarFamily::Binomial && trials < 2) throw ArgumentError("Binomial mixtures need at least two trials");
  check_counts(x, family, trials);
  const std::size_t n = x.size();
  const ScalarComponents global = from_mom(run_mom(x, family, trials), family, trials);

  ScalarClusterResult out;
  const SubsampleFit full = fit_subsample(x, family, init, trials, seed, global);
  out.estimate = full.components;
  if (full.fallback) {
    out.fallback_used = true;
    out.flags.push_back("full sample: " + full.note);
  }

  if (mode == ScalarMode::Practical) {
    out.labels = label_all(x, full.components);
  } else {
    if (n < 3) throw ArgumentError("leave-one-out clustering needs at least three observations");
    std::vector<Labels> per_i(n);
    std::vector<long> rest(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(i), rest.begin());
      std::copy(x.begin() + static_cast<std::ptrdiff_t>(i) + 1, x.end(), rest.begin() + static_cast<std::ptrdiff_t>(i));
      const SubsampleFit fit = fit_subsample(rest, family, init, trials, derive_seed(seed, i), global);
      if (fit.fallback) {
        out.fallback_used = true;
        out.flags.push_back("item " + std::to_string(i + 1) + ": " + fit.note);
      }
      Labels runs(n);
      for (std::size_t j = 0, p = 0; j < n; ++j) runs[j] = j == i ? scalar_mle_label(x[i], fit.components) : fit.labels[p++];
      per_i[i] = std::move(runs);
    }
    out.labels = consensus_align(per_i);
  }
  if (out.estimate.param1 == out.estimate.param2) {
    out.fallback_used = true;
    out.flags.emplace_back("components coincide; no separation");
  }
  return out;
}

}  // namespace mixclust
