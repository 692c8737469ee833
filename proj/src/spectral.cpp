#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "oclu/baselines.hpp"
#include "oclu/eigen_sym.hpp"

namespace oclu {

std::vector<double> pairwise_distances(std::span<const Point> points) {
  const std::size_t n = points.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i * n + j] = d[j * n + i] =
          std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
    }
  }
  return d;
}

double median_pairwise_distance(std::span<const Point> points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("median_pairwise_distance: need at least 2 points");
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d.push_back(std::hypot(points[i].x - points[j].x, points[i].y - points[j].y));
    }
  }
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

double AffinityParams::resolve(std::span<const Point> points) const {
  const double s = rule == SigmaRule::Fixed ? sigma : median_factor * median_pairwise_distance(points);
  if (!(s > 0)) throw std::invalid_argument("affinity: sigma must be > 0");
  return s;
}

std::vector<double> rbf_affinity(std::span<const Point> points, double sigma) {
  const std::size_t n = points.size();
  const double scale = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = points[i].x - points[j].x, dy = points[i].y - points[j].y;
      w[i * n + j] = w[j * n + i] = std::exp(-(dx * dx + dy * dy) * scale);
    }
  }
  return w;
}

double ncut_value(std::span<const double> w, std::size_t n, const std::vector<bool>& side) {
  double cut = 0, assoc_a = 0, assoc_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = w[i * n + j];
      (side[i] ? assoc_a : assoc_b) += v;
      if (side[i] && !side[j]) cut += v;
    }
  }
  if (assoc_a <= 0 || assoc_b <= 0) return std::numeric_limits<double>::infinity();
  return cut / assoc_a + cut / assoc_b;
}

namespace {

SymmetricEigen solve(std::span<const double> a, std::size_t n, EigenSolver solver) {
  return solver == EigenSolver::Jacobi ? jacobi_eigen(a, n) : tridiagonal_eigen(a, n);
}

std::size_t nearest_index(const Point& p, std::span<const Point> pool,
                          std::span<const std::size_t> candidates) {
  std::size_t best = candidates.front();
  double bd = std::numeric_limits<double>::infinity();
  for (auto c : candidates) {
    const double d = std::hypot(p.x - pool[c].x, p.y - pool[c].y);
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  return best;
}

// Runs `cluster` on at most `max_points` points; the rest copy the label of
// their nearest sampled point.
template <typename Fn>
std::vector<int> with_subsampling(std::span<const Point> points, std::size_t max_points, Rng& rng,
                                  Fn&& cluster) {
  const std::size_t n = points.size();
  if (n <= max_points) return cluster(points);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < max_points; ++i) {
    std::swap(idx[i], idx[uniform_int(rng, static_cast<std::int64_t>(i), static_cast<std::int64_t>(n) - 1)]);
  }
  idx.resize(max_points);
  std::sort(idx.begin(), idx.end());
  std::vector<Point> sample;
  for (auto i : idx) sample.push_back(points[i]);
  const auto sample_labels = cluster(std::span<const Point>(sample));

  std::vector<std::size_t> all(sample.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = sample_labels[nearest_index(points[i], sample, all)];
  return labels;
}

std::vector<std::vector<std::size_t>> components(std::span<const double> w, std::size_t n,
                                                 std::span<const std::size_t> members) {
  const std::size_t m = members.size();
  std::vector<int> comp(m, -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < m; ++s) {
    if (comp[s] >= 0) continue;
    out.emplace_back();
    std::vector<std::size_t> stack{s};
    comp[s] = static_cast<int>(out.size() - 1);
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      out.back().push_back(members[a]);
      for (std::size_t b = 0; b < m; ++b) {
        if (comp[b] < 0 && w[members[a] * n + members[b]] > 0) {
          comp[b] = comp[s];
          stack.push_back(b);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

// Splits one connected part at the sweep threshold of the second generalized
// eigenvector of (D - W) x = lambda D x that minimizes Ncut.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> ncut_bipartition(
    std::span<const double> w, std::size_t n, const std::vector<std::size_t>& part,
    EigenSolver solver) {
  const std::size_t m = part.size();
  std::vector<double> deg(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) deg[a] += w[part[a] * n + part[b]];
  }
  std::vector<double> inv_sqrt(m);
  for (std::size_t a = 0; a < m; ++a) inv_sqrt[a] = 1.0 / std::sqrt(deg[a]);
  std::vector<double> norm(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      norm[a * m + b] = inv_sqrt[a] * w[part[a] * n + part[b]] * inv_sqrt[b];
    }
  }
  // Largest eigenvalues of D^-1/2 W D^-1/2 are the smallest of the
  // normalized Laplacian; column m-2 is the second one.
  const auto eig = solve(norm, m, solver);
  std::vector<double> x(m);
  for (std::size_t a = 0; a < m; ++a) x[a] = eig.vector(a, m - 2) * inv_sqrt[a];

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  const double total = std::accumulate(deg.begin(), deg.end(), 0.0);
  std::vector<double> to_a(m, 0.0);  // sum of affinities from each node into A
  double cut = 0.0, assoc_a = 0.0, best = std::numeric_limits<double>::infinity();
  std::size_t best_split = 1;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const std::size_t p = order[i];
    cut += deg[p] - 2.0 * to_a[p];
    assoc_a += deg[p];
    for (std::size_t b = 0; b < m; ++b) to_a[b] += w[part[p] * n + part[b]];
    if (x[order[i + 1]] == x[p]) continue;
    const double value = cut / assoc_a + cut / (total - assoc_a);
    if (value < best) {
      best = value;
      best_split = i + 1;
    }
  }
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < m; ++i) (i < best_split ? a : b).push_back(part[order[i]]);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {a, b};
}

ClusteringResult finish(std::vector<int> labels, Method method, int k, double sigma,
                        std::chrono::steady_clock::time_point start) {
  ClusteringResult r;
  r.labels = std::move(labels);
  r.k_found = normalize_labels(r.labels);
  r.method = method;
  r.params_used = {{"k", k}, {"sigma", sigma}};
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

ClusteringResult spectral_njw(std::span<const Point> points, int k, const AffinityParams& affinity,
                              Rng& rng, const SpectralOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = points.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw std::invalid_argument("spectral_njw: need 1 <= k <= n");
  const double sigma = affinity.resolve(points);
  if (k == 1) return finish(std::vector<int>(n, 0), Method::NJW, k, sigma, start);

  auto cluster = [&](std::span<const Point> pts) {
    const std::size_t m = pts.size();
    const auto w = rbf_affinity(pts, sigma);
    std::vector<double> deg(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) deg[i] += w[i * m + j];
    }
    std::vector<std::size_t> active, isolated;
    for (std::size_t i = 0; i < m; ++i) (deg[i] > 1e-12 ? active : isolated).push_back(i);
    if (active.size() < static_cast<std::size_t>(k)) {
      // Degenerate bandwidth: no usable graph, fall back to plain k-means.
      return kmeans(pts, k, 10, rng).result.labels;
    }

    const std::size_t a = active.size();
    std::vector<double> norm(a * a);
    for (std::size_t i = 0; i < a; ++i) {
      for (std::size_t j = 0; j < a; ++j) {
        norm[i * a + j] = w[active[i] * m + active[j]] / std::sqrt(deg[active[i]] * deg[active[j]]);
      }
    }
    const auto eig = solve(norm, a, options.solver);
    const auto K = static_cast<std::size_t>(k);
    std::vector<double> rows(a * K);
    for (std::size_t i = 0; i < a; ++i) {
      double len = 0.0;
      for (std::size_t c = 0; c < K; ++c) {
        const double v = eig.vector(i, a - 1 - c);
        rows[i * K + c] = v;
        len += v * v;
      }
      len = std::sqrt(len);
      if (len > 0) {
        for (std::size_t c = 0; c < K; ++c) rows[i * K + c] /= len;
      }
    }
    const auto row_labels = kmeans_rows(rows, K, k, 10, rng);
    std::vector<int> labels(m, -1);
    for (std::size_t i = 0; i < a; ++i) labels[active[i]] = row_labels[i];
    for (auto i : isolated) labels[i] = labels[nearest_index(pts[i], pts, active)];
    return labels;
  };
  return finish(with_subsampling(points, options.max_points, rng, cluster), Method::NJW, k, sigma, start);
}

ClusteringResult normalized_cut(std::span<const Point> points, int k, const AffinityParams& affinity,
                                Rng& rng, const SpectralOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = points.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw std::invalid_argument("normalized_cut: need 1 <= k <= n");
  const double sigma = affinity.resolve(points);

  auto cluster = [&](std::span<const Point> pts) {
    const std::size_t m = pts.size();
    const auto w = rbf_affinity(pts, sigma);
    std::vector<std::size_t> everyone(m);
    std::iota(everyone.begin(), everyone.end(), 0);

    // Connected components are parts from the start.
    auto parts = components(w, m, everyone);
    std::stable_sort(parts.begin(), parts.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    if (parts.size() > static_cast<std::size_t>(k)) {
      // Too many components: the smaller ones join the kept part holding
      // their nearest point.
      std::vector<std::vector<std::size_t>> kept(parts.begin(), parts.begin() + k);
      for (std::size_t c = static_cast<std::size_t>(k); c < parts.size(); ++c) {
        std::size_t target = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < kept.size(); ++t) {
          for (auto i : parts[c]) {
            const auto j = nearest_index(pts[i], pts, kept[t]);
            const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
            if (d < bd) {
              bd = d;
              target = t;
            }
          }
        }
        kept[target].insert(kept[target].end(), parts[c].begin(), parts[c].end());
      }
      parts = std::move(kept);
    }

    while (parts.size() < static_cast<std::size_t>(k)) {
      // Split the part with the most points next.
      std::size_t pick = 0;
      for (std::size_t p = 1; p < parts.size(); ++p) {
        if (parts[p].size() > parts[pick].size()) pick = p;
      }
      if (parts[pick].size() < 2) break;
      auto sub = components(w, m, parts[pick]);
      std::vector<std::size_t> a, b;
      if (sub.size() > 1) {
        std::stable_sort(sub.begin(), sub.end(),
                         [](const auto& x, const auto& y) { return x.size() > y.size(); });
        a = sub[0];
        for (std::size_t s = 1; s < sub.size(); ++s) b.insert(b.end(), sub[s].begin(), sub[s].end());
      } else {
        std::tie(a, b) = ncut_bipartition(w, m, parts[pick], options.solver);
      }
      parts[pick] = std::move(a);
      parts.push_back(std::move(b));
    }

    std::vector<int> labels(m, 0);
    for (std::size_t p = 0; p < parts.size(); ++p) {
      for (auto i : parts[p]) labels[i] = static_cast<int>(p);
    }
    return labels;
  };
  return finish(with_subsampling(points, options.max_points, rng, cluster), Method::NormalizedCut, k,
                sigma, start);
}

}  // namespace oclu
