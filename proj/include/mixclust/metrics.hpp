#pragma once

#include <vector>

#include "mixclust/models.hpp"

namespace mixclust {

struct HammingReport {
  double rate = 0.0;
  // best_perm[c] is the label in `z` matched to true label c.
  std::vector<int> best_perm;
  // Mismatch count for every permutation of [k], in lexicographic order.
  std::vector<int> raw_mismatch_counts;
};

// Misclustering rate min over permutations pi of (1/n) #{i : z_i != pi(z*_i)},
// by exhaustive search over all k! permutations (k <= 6). Ties keep the
// lexicographically first permutation.
HammingReport hamming(const Labels& z, const Labels& z_star, int k);

inline double hamming_rate(const Labels& z, const Labels& z_star, int k) { return hamming(z, z_star, k).rate; }

// exp(-I*/2)
double theoretical_rate(double i_star);

}  // namespace mixclust
