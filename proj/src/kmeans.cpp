#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oclu/baselines.hpp"

namespace oclu {

namespace {

struct LloydRun {
  std::vector<int> labels;
  std::vector<double> centers;  // k x d
  double sse = 0.0;
  std::vector<double> trace;
};

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

// k-means++: first center uniform, then proportional to squared distance to
// the nearest chosen center.
std::vector<double> seed_plus_plus(std::span<const double> x, std::size_t n, std::size_t d,
                                   int k, Rng& rng) {
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(k) * d);
  const auto first = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
  centers.insert(centers.end(), x.begin() + first * d, x.begin() + (first + 1) * d);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    const double* last = centers.data() + (c - 1) * d;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(x.data() + i * d, last, d));
      total += nearest[i];
    }
    std::size_t pick = 0;
    if (total > 0) {
      double r = uniform(rng, 0.0, total);
      for (pick = 0; pick + 1 < n; ++pick) {
        r -= nearest[pick];
        if (r < 0) break;
      }
    } else {
      pick = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
    }
    centers.insert(centers.end(), x.begin() + pick * d, x.begin() + (pick + 1) * d);
  }
  return centers;
}

LloydRun lloyd(std::span<const double> x, std::size_t n, std::size_t d, int k, Rng& rng,
               int max_iterations) {
  LloydRun run;
  run.centers = seed_plus_plus(x, n, d, k, rng);
  run.labels.assign(n, -1);
  std::vector<double> dist(n);
  const auto K = static_cast<std::size_t>(k);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < K; ++c) {
        const double dd = sq_dist(x.data() + i * d, run.centers.data() + c * d, d);
        if (dd < bd) {
          bd = dd;
          best = static_cast<int>(c);
        }
      }
      dist[i] = bd;
      if (run.labels[i] != best) {
        run.labels[i] = best;
        changed = true;
      }
    }

    // Empty clusters take the point farthest from its current center.
    std::vector<std::size_t> counts(K, 0);
    for (int l : run.labels) ++counts[l];
    for (std::size_t c = 0; c < K; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[run.labels[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
      }
      if (far == n) break;
      --counts[run.labels[far]];
      run.labels[far] = static_cast<int>(c);
      counts[c] = 1;
      dist[far] = 0.0;
      changed = true;
    }

    std::fill(run.centers.begin(), run.centers.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* ctr = run.centers.data() + run.labels[i] * d;
      for (std::size_t j = 0; j < d; ++j) ctr[j] += x[i * d + j];
    }
    for (std::size_t c = 0; c < K; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) run.centers[c * d + j] /= static_cast<double>(counts[c]);
    }
    run.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      run.sse += sq_dist(x.data() + i * d, run.centers.data() + run.labels[i] * d, d);
    }
    run.trace.push_back(run.sse);
    if (!changed) break;
  }
  return run;
}

LloydRun best_of(std::span<const double> x, std::size_t d, int k, int restarts, Rng& rng,
                 int max_iterations) {
  const std::size_t n = d ? x.size() / d : 0;
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("kmeans: need 1 <= k <= n (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  }
  LloydRun best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    auto run = lloyd(x, n, d, k, rng, max_iterations);
    if (run.sse < best.sse) best = std::move(run);
  }
  return best;
}

}  // namespace

KMeansResult kmeans(std::span<const Point> points, int k, int restarts, Rng& rng,
                    int max_iterations) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> x;
  x.reserve(points.size() * 2);
  for (const auto& p : points) {
    x.push_back(p.x);
    x.push_back(p.y);
  }
  auto run = best_of(x, 2, k, restarts, rng, max_iterations);

  KMeansResult out;
  out.sse = run.sse;
  out.sse_trace = std::move(run.trace);
  for (int c = 0; c < k; ++c) out.centers.push_back({run.centers[2 * c], run.centers[2 * c + 1]});
  out.result.labels = std::move(run.labels);
  out.result.k_found = k;
  out.result.method = Method::KMeans;
  out.result.params_used = {{"k", k}, {"restarts", restarts}};
  out.result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<int> kmeans_rows(std::span<const double> rows, std::size_t dims, int k, int restarts,
                             Rng& rng, int max_iterations) {
  if (dims == 0 || rows.size() % dims) throw std::invalid_argument("kmeans_rows: ragged rows");
  return best_of(rows, dims, k, restarts, rng, max_iterations).labels;
}

}  // namespace oclu
