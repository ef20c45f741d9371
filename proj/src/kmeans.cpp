#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "mixclust/error.hpp"
#include "mixclust/init_cluster.hpp"
#include "mixclust/kernels.hpp"
#include "mixclust/rng.hpp"

namespace mixclust {
namespace {

// Row-major copy so that every point is a contiguous span.
struct Points {
  std::vector<double> data;
  std::size_t n = 0, dim = 0;

  explicit Points(const Matrix& rows)
      : data(static_cast<std::size_t>(rows.size())), n(static_cast<std::size_t>(rows.rows())),
        dim(static_cast<std::size_t>(rows.cols())) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < dim; ++c) data[i * dim + c] = rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
  }
  std::span<const double> operator[](std::size_t i) const { return {data.data() + i * dim, dim}; }
};

struct Run {
  Labels labels;
  std::vector<double> centers;  // k * dim, row-major
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> history;
};

double assign(const Points& pts, const std::vector<double>& centers, int k, Labels& labels, std::vector<double>& dist) {
  double objective = 0.0;
  for (std::size_t i = 0; i < pts.n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int c = 0; c < k; ++c) {
      const double dd = kernels::squared_distance(pts[i], {centers.data() + static_cast<std::size_t>(c) * pts.dim, pts.dim});
      if (dd < best) {
        best = dd;
        arg = c;
      }
    }
    labels[i] = arg;
    dist[i] = best;
    objective += best;
  }
  return objective;
}

// Re-seeds empty clusters, then recomputes centers as cluster means.
void update_centers(const Points& pts, int k, Labels& labels, std::vector<double>& dist, std::vector<double>& centers) {
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) continue;
    // Farthest point from its own center, taken from a cluster with > 1 member.
    std::size_t far = pts.n;
    double far_d = 0.0;
    for (std::size_t i = 0; i < pts.n; ++i) {
      if (counts[static_cast<std::size_t>(labels[i])] > 1 && dist[i] > far_d) {
        far_d = dist[i];
        far = i;
      }
    }
    if (far == pts.n) continue;
    --counts[static_cast<std::size_t>(labels[far])];
    labels[far] = c;
    dist[far] = 0.0;
    counts[static_cast<std::size_t>(c)] = 1;
  }
  std::vector<double> fresh(centers.size(), 0.0);
  for (std::size_t i = 0; i < pts.n; ++i) {
    kernels::axpy(1.0, pts[i], {fresh.data() + static_cast<std::size_t>(labels[i]) * pts.dim, pts.dim});
  }
  for (int c = 0; c < k; ++c) {
    const auto cnt = counts[static_cast<std::size_t>(c)];
    double* row = fresh.data() + static_cast<std::size_t>(c) * pts.dim;
    if (cnt == 0) {
      std::copy_n(centers.data() + static_cast<std::size_t>(c) * pts.dim, pts.dim, row);
    } else {
      for (std::size_t j = 0; j < pts.dim; ++j) row[j] /= cnt;
    }
  }
  centers.swap(fresh);
}

std::vector<double> seed_plus_plus(const Points& pts, int k, Rng& rng) {
  std::vector<double> centers(static_cast<std::size_t>(k) * pts.dim);
  std::uniform_int_distribution<std::size_t> pick(0, pts.n - 1);
  std::size_t first = pick(rng);
  std::copy_n(pts[first].data(), pts.dim, centers.begin());
  std::vector<double> d2(pts.n);
  for (std::size_t i = 0; i < pts.n; ++i) d2[i] = kernels::squared_distance(pts[i], pts[first]);
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t chosen = 0;
    if (total > 0.0) {
      double u = std::generate_canonical<double, 53>(rng) * total;
      chosen = pts.n - 1;
      for (std::size_t i = 0; i < pts.n; ++i) {
        if (d2[i] <= 0.0) continue;
        if (u < d2[i]) {
          chosen = i;
          break;
        }
        u -= d2[i];
      }
      while (d2[chosen] <= 0.0 && chosen > 0) --chosen;
    } else {
      chosen = pick(rng);
    }
    std::span<const double> center = pts[chosen];
    std::copy_n(center.data(), pts.dim, centers.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(c) * pts.dim));
    for (std::size_t i = 0; i < pts.n; ++i) d2[i] = std::min(d2[i], kernels::squared_distance(pts[i], center));
  }
  return centers;
}

// Single-point transfers (Hartigan): move a point whenever that lowers the
// within-cluster sum of squares, updating both centers exactly. A stable
// partition is also a Lloyd fixed point.
bool transfer_pass(const Points& pts, int k, Labels& labels, std::vector<double>& centers, int max_passes) {
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  bool moved_any = false;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < pts.n; ++i) {
      const int from = labels[i];
      const double n_from = counts[static_cast<std::size_t>(from)];
      if (n_from <= 1) continue;
      auto center = [&](int c) {
        return std::span<double>(centers.data() + static_cast<std::size_t>(c) * pts.dim, pts.dim);
      };
      const double cost_out = n_from / (n_from - 1.0) * kernels::squared_distance(pts[i], center(from));
      int to = from;
      double best_gain = 0.0;
      for (int c = 0; c < k; ++c) {
        if (c == from) continue;
        const double n_to = counts[static_cast<std::size_t>(c)];
        const double gain = cost_out - n_to / (n_to + 1.0) * kernels::squared_distance(pts[i], center(c));
        if (gain > best_gain * (1.0 + 1e-12) + 1e-12 * cost_out) {
          best_gain = gain;
          to = c;
        }
      }
      if (to == from) continue;
      const double n_to = counts[static_cast<std::size_t>(to)];
      auto cf = center(from), ct = center(to);
      for (std::size_t j = 0; j < pts.dim; ++j) {
        cf[j] = (cf[j] * n_from - pts[i][j]) / (n_from - 1.0);
        ct[j] = (ct[j] * n_to + pts[i][j]) / (n_to + 1.0);
      }
      --counts[static_cast<std::size_t>(from)];
      ++counts[static_cast<std::size_t>(to)];
      labels[i] = to;
      moved = moved_any = true;
    }
    if (!moved) break;
  }
  return moved_any;
}

Run lloyd(const Points& pts, int k, Rng& rng, int max_iterations) {
  Run run;
  run.centers = seed_plus_plus(pts, k, rng);
  run.labels.assign(pts.n, -1);
  Labels labels(pts.n, 0);
  std::vector<double> dist(pts.n, 0.0);
  for (int it = 0; it < max_iterations; ++it) {
    const double objective = assign(pts, run.centers, k, labels, dist);
    run.history.push_back(objective);
    if (labels == run.labels) break;
    run.labels = labels;
    update_centers(pts, k, labels, dist, run.centers);
    if (labels != run.labels) {
      // Re-seeding moved points: objective and labels changed outside assign().
      run.labels.assign(pts.n, -1);
    }
  }
  run.labels = labels;
  if (transfer_pass(pts, k, run.labels, run.centers, max_iterations)) {
    // Recompute the means from scratch and record the improved objective.
    update_centers(pts, k, run.labels, dist, run.centers);
    run.history.push_back(assign(pts, run.centers, k, run.labels, dist));
  }
  run.objective = run.history.back();
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& rows, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw ArgumentError("kmeans: k must be positive");
  if (static_cast<Eigen::Index>(k) > rows.rows()) {
    throw ArgumentError("kmeans: k = " + std::to_string(k) + " exceeds the " + std::to_string(rows.rows()) + " rows");
  }
  if (!rows.allFinite()) throw NumericError("kmeans: non-finite input");
  const Points pts(rows);
  Run best;
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    Run run = lloyd(pts, k, rng, std::max(1, options.max_iterations));
    if (best.labels.empty() || run.objective < best.objective * (1.0 - options.rel_tol)) {
      best = std::move(run);
    }
  }
  KMeansResult out;
  out.labels = std::move(best.labels);
  out.objective = best.objective;
  out.history = std::move(best.history);
  out.centers.resize(k, static_cast<Eigen::Index>(pts.dim));
  for (int c = 0; c < k; ++c)
    for (std::size_t j = 0; j < pts.dim; ++j) out.centers(c, static_cast<Eigen::Index>(j)) = best.centers[static_cast<std::size_t>(c) * pts.dim + j];
  return out;
}

std::vector<int> align_labels(const Labels& reference, const Labels& candidate, int k) {
  if (reference.size() != candidate.size()) throw ArgumentError("align_labels: label vectors differ in length");
  if (reference.empty()) throw ArgumentError("align_labels: empty overlap");
  if (k < 1 || k > 8) throw ArgumentError("align_labels: k must be in [1, 8]");
  std::vector<int> overlap(static_cast<std::size_t>(k * k), 0);  // [candidate][reference]
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i] < 0 || reference[i] >= k || candidate[i] < 0 || candidate[i] >= k)
      throw ArgumentError("align_labels: label out of range");
    ++overlap[static_cast<std::size_t>(candidate[i] * k + reference[i])];
  }
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  int best_score = -1;
  do {
    int score = 0;
    for (int c = 0; c < k; ++c) score += overlap[static_cast<std::size_t>(c * k + perm[static_cast<std::size_t>(c)])];
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Labels apply_permutation(const Labels& labels, const std::vector<int>& perm) {
  Labels out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = perm.at(static_cast<std::size_t>(labels[i]));
  return out;
}

Labels consensus_align(const std::vector<Labels>& per_run, std::vector<bool>* bijective) {
  const std::size_t n = per_run.size();
  if (n == 0) return {};
  for (const Labels& run : per_run)
    if (run.size() != n) throw ArgumentError("consensus_align: every run must label all items");
  const Labels& ref = per_run[0];
  Labels out(n, 0);
  out[0] = ref[0];
  if (bijective) bijective->assign(n, true);
  for (std::size_t i = 1; i < n; ++i) {
    const auto mapped = [&](int t) {
      int overlap[2] = {0, 0};
      for (std::size_t j = 0; j < n; ++j)
        if (per_run[i][j] == t) ++overlap[ref[j]];
      return overlap[1] > overlap[0] ? 1 : 0;
    };
    out[i] = mapped(per_run[i][i]);
    if (bijective) (*bijective)[i] = mapped(0) != mapped(1);
  }
  return out;
}

}  // namespace mixclust
