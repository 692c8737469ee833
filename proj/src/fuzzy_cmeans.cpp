#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "oclu/baselines.hpp"

namespace oclu {

std::vector<double> fcm_memberships(std::span<const Point> points, std::span<const Point> centers,
                                    double fuzziness) {
  if (!(fuzziness > 1.0)) throw std::invalid_argument("fuzzy_cmeans: fuzziness must be > 1");
  const std::size_t n = points.size(), K = centers.size();
  const double exponent = 2.0 / (fuzziness - 1.0);
  std::vector<double> u(n * K, 0.0);
  std::vector<double> d(K);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = &u[i * K];
    std::size_t coincident = K;
    for (std::size_t c = 0; c < K; ++c) {
      d[c] = std::hypot(points[i].x - centers[c].x, points[i].y - centers[c].y);
      if (d[c] < 1e-12 && coincident == K) coincident = c;
    }
    if (coincident < K) {
      row[coincident] = 1.0;
      continue;
    }
    // u_ic = 1 / sum_l (d_ic / d_il)^(2/(m-1)), scaled by the nearest
    // distance to stay finite for large exponents.
    const double dmin = *std::min_element(d.begin(), d.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < K; ++c) sum += d[c] = std::pow(dmin / d[c], exponent);
    for (std::size_t c = 0; c < K; ++c) row[c] = d[c] / sum;
  }
  return u;
}

FuzzyCMeansResult fuzzy_cmeans(std::span<const Point> points, int k,
                               const FuzzyCMeansParams& params, Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = points.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("fuzzy_cmeans: need 1 <= k <= n");
  }
  if (!(params.fuzziness > 1.0)) throw std::invalid_argument("fuzzy_cmeans: fuzziness must be > 1");
  const auto K = static_cast<std::size_t>(k);
  const double m = params.fuzziness;

  FuzzyCMeansResult out;
  auto& u = out.memberships;
  u.resize(n * K);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < K; ++c) sum += u[i * K + c] = uniform(rng, 0.01, 1.0);
    for (std::size_t c = 0; c < K; ++c) u[i * K + c] /= sum;
  }

  out.centers.assign(K, {});
  for (out.iterations = 0; out.iterations < params.max_iterations;) {
    ++out.iterations;
    for (std::size_t c = 0; c < K; ++c) {
      double wx = 0, wy = 0, ws = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = std::pow(u[i * K + c], m);
        wx += w * points[i].x;
        wy += w * points[i].y;
        ws += w;
      }
      if (ws > 0) out.centers[c] = {wx / ws, wy / ws};
    }

    const auto next = fcm_memberships(points, out.centers, m);
    double max_change = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) max_change = std::max(max_change, std::abs(next[i] - u[i]));
    u = next;
    if (max_change < params.tolerance) break;
  }

  auto& r = out.result;
  r.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &u[i * K];
    r.labels[i] = static_cast<int>(std::max_element(row, row + K) - row);
  }
  r.k_found = normalize_labels(r.labels);
  r.method = Method::FuzzyCMeans;
  r.params_used = {{"k", k}, {"m", m}, {"tol", params.tolerance}};
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace oclu
