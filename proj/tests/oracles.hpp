#pragma once

// Naive reference implementations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oclu/autodiff.hpp"
#include "oclu/baselines.hpp"

namespace testing {

using oclu::DensityPeaks;
using oclu::Point;
using oclu::ad::Tensor;

// Direct loops, no im2col.
inline Tensor<double> naive_conv(const Tensor<double>& x, const Tensor<double>& w,
                                 const Tensor<double>& b) {
  const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2), F = w.dim(0), k = w.dim(2);
  const long r = static_cast<long>(k / 2);
  Tensor<double> y({F, H, W});
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t i = 0; i < H; ++i)
      for (std::size_t j = 0; j < W; ++j) {
        double s = b[f];
        for (std::size_t c = 0; c < C; ++c)
          for (std::size_t di = 0; di < k; ++di)
            for (std::size_t dj = 0; dj < k; ++dj) {
              const long yy = static_cast<long>(i + di) - r, xx = static_cast<long>(j + dj) - r;
              if (yy < 0 || xx < 0 || yy >= static_cast<long>(H) || xx >= static_cast<long>(W)) continue;
              s += x.at(c, yy, xx) * w[((f * C + c) * k + di) * k + dj];
            }
        y.at(f, i, j) = s;
      }
  return y;
}

inline Tensor<double> naive_pool(const Tensor<double>& x) {
  Tensor<double> y({x.dim(0), x.dim(1) / 2, x.dim(2) / 2});
  for (std::size_t c = 0; c < x.dim(0); ++c)
    for (std::size_t i = 0; i < y.dim(1); ++i)
      for (std::size_t j = 0; j < y.dim(2); ++j) {
        double m = x.at(c, 2 * i, 2 * j);
        for (std::size_t d = 1; d < 4; ++d) m = std::max(m, x.at(c, 2 * i + d / 2, 2 * j + d % 2));
        y.at(c, i, j) = m;
      }
  return y;
}

inline Tensor<double> naive_upsample(const Tensor<double>& x) {
  Tensor<double> y({x.dim(0), x.dim(1) * 2, x.dim(2) * 2});
  for (std::size_t c = 0; c < y.dim(0); ++c)
    for (std::size_t i = 0; i < y.dim(1); ++i)
      for (std::size_t j = 0; j < y.dim(2); ++j) y.at(c, i, j) = x.at(c, i / 2, j / 2);
  return y;
}

// Direct pair enumeration: the Hamming agreement of co-membership matrices.
inline double rand_by_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  double agree = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      agree += (a[i] == a[j]) == (b[i] == b[j]);
      total += 1;
    }
  }
  return agree / total;
}

// Direct transcription of the density-peaks definitions.
inline DensityPeaks naive_peaks(const std::vector<Point>& pts, double dc) {
  const std::size_t n = pts.size();
  DensityPeaks p;
  p.rho.assign(n, 0);
  p.delta.assign(n, 0);
  p.nearest_higher.assign(n, 0);
  auto d = [&](std::size_t i, std::size_t j) {
    return std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) p.rho[i] += std::exp(-(d(i, j) / dc) * (d(i, j) / dc));
  auto higher = [&](std::size_t j, std::size_t i) {
    return p.rho[j] > p.rho[i] || (p.rho[j] == p.rho[i] && j < i);
  };
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = i;
    double far = 0;
    for (std::size_t j = 0; j < n; ++j) {
      far = std::max(far, d(i, j));
      if (j != i && higher(j, i) && d(i, j) < best) best = d(i, j), arg = j;
    }
    if (arg == i) {
      double global = 0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) global = std::max(global, d(a, b));
      best = global;
    }
    p.delta[i] = best;
    p.nearest_higher[i] = arg;
  }
  return p;
}

}  // namespace testing
