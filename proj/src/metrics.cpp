#include "mixclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixclust/error.hpp"

namespace mixclust {

HammingReport hamming(const Labels& z, const Labels& z_star, int k) {
  if (z.size() != z_star.size()) throw ArgumentError("hamming: label vectors differ in length");
  if (k < 1 || k > 6) throw ArgumentError("hamming: k must be in [1, 6], got " + std::to_string(k));
  if (z.empty()) throw ArgumentError("hamming: empty label vectors");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < 0 || z[i] >= k || z_star[i] < 0 || z_star[i] >= k) throw ArgumentError("hamming: label out of range");
  }
  // Contingency table: joint[a][b] = #{i : z*_i = a, z_i = b}.
  std::vector<int> joint(static_cast<std::size_t>(k * k), 0);
  for (std::size_t i = 0; i < z.size(); ++i) ++joint[static_cast<std::size_t>(z_star[i] * k + z[i])];

  HammingReport report;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  int best = -1;
  const int n = static_cast<int>(z.size());
  do {
    int agree = 0;
    for (int a = 0; a < k; ++a) agree += joint[static_cast<std::size_t>(a * k + perm[static_cast<std::size_t>(a)])];
    const int mismatches = n - agree;
    report.raw_mismatch_counts.push_back(mismatches);
    if (best < 0 || mismatches < best) {
      best = mismatches;
      report.best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  report.rate = static_cast<double>(best) / n;
  return report;
}

double theoretical_rate(double i_star) {
  if (i_star < 0.0) throw ArgumentError("I* must be nonnegative");
  return std::exp(-i_star / 2.0);
}

}  // namespace mixclust
