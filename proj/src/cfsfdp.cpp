#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "oclu/baselines.hpp"

namespace oclu {

double CfsfdpParams::resolve_cutoff(std::span<const Point> points) const {
  if (cutoff > 0) return cutoff;
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("cfsfdp: need at least 2 points for a percentile cutoff");
  if (!(percentile > 0 && percentile < 1)) throw std::invalid_argument("cfsfdp: percentile must be in (0, 1)");
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d.push_back(std::hypot(points[i].x - points[j].x, points[i].y - points[j].y));
    }
  }
  const auto pos = static_cast<std::size_t>(percentile * static_cast<double>(d.size() - 1));
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(pos), d.end());
  const double dc = d[pos];
  if (!(dc > 0)) throw std::invalid_argument("cfsfdp: percentile cutoff is zero (duplicate points)");
  return dc;
}

DensityPeaks density_peaks(std::span<const Point> points, double cutoff) {
  if (!(cutoff > 0)) throw std::invalid_argument("density_peaks: cutoff must be > 0");
  const std::size_t n = points.size();
  const auto d = pairwise_distances(points);

  DensityPeaks dp;
  dp.rho.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = d[i * n + j] / cutoff;
      const double k = std::exp(-r * r);
      dp.rho[i] += k;
      dp.rho[j] += k;
    }
  }

  // Descending density; equal densities keep index order, so the lower
  // index counts as the denser one and chains stay acyclic.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dp.rho[a] > dp.rho[b]; });

  const double max_dist = n ? *std::max_element(d.begin(), d.end()) : 0.0;
  dp.delta.assign(n, 0.0);
  dp.nearest_higher.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    if (r == 0) {
      dp.delta[i] = max_dist;
      dp.nearest_higher[i] = i;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = order[0];
    for (std::size_t s = 0; s < r; ++s) {
      const std::size_t j = order[s];
      if (d[i * n + j] < best) {
        best = d[i * n + j];
        arg = j;
      }
    }
    dp.delta[i] = best;
    dp.nearest_higher[i] = arg;
  }
  return dp;
}

CfsfdpResult cfsfdp(std::span<const Point> points, const CfsfdpParams& params) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = points.size();
  if (params.centers < 1 || static_cast<std::size_t>(params.centers) > n) {
    throw std::invalid_argument("cfsfdp: need 1 <= centers <= n");
  }
  const double dc = params.resolve_cutoff(points);

  CfsfdpResult out;
  out.peaks = density_peaks(points, dc);
  const auto& rho = out.peaks.rho;
  const auto& delta = out.peaks.delta;

  // Decision graph normalized to [0, 1]^2; centers are the points nearest
  // to its (max, max) corner.
  const auto [rmin, rmax] = std::minmax_element(rho.begin(), rho.end());
  const auto [dmin, dmax] = std::minmax_element(delta.begin(), delta.end());
  const double rspan = *rmax - *rmin, dspan = *dmax - *dmin;
  std::vector<double> corner_dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rspan > 0 ? (rho[i] - *rmin) / rspan : 1.0;
    const double y = dspan > 0 ? (delta[i] - *dmin) / dspan : 1.0;
    corner_dist[i] = std::hypot(1.0 - x, 1.0 - y);
  }
  std::vector<std::size_t> by_corner(n);
  std::iota(by_corner.begin(), by_corner.end(), 0);
  std::stable_sort(by_corner.begin(), by_corner.end(),
                   [&](std::size_t a, std::size_t b) { return corner_dist[a] < corner_dist[b]; });

  // The density maximum heads every chain, so it is always a center.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rho[a] > rho[b]; });
  out.center_indices.push_back(order[0]);
  for (auto i : by_corner) {
    if (out.center_indices.size() == static_cast<std::size_t>(params.centers)) break;
    if (i != order[0]) out.center_indices.push_back(i);
  }

  auto& r = out.result;
  r.labels.assign(n, -1);
  for (std::size_t c = 0; c < out.center_indices.size(); ++c) {
    r.labels[out.center_indices[c]] = static_cast<int>(c);
  }
  for (auto i : order) {
    if (r.labels[i] < 0) r.labels[i] = r.labels[out.peaks.nearest_higher[i]];
  }
  r.k_found = static_cast<int>(out.center_indices.size());
  r.method = Method::CFSFDP;
  r.params_used = {{"centers", params.centers}, {"cutoff", dc}};
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace oclu
