#include <chrono>
#include <cmath>
#include <stdexcept>

#include "oclu/baselines.hpp"

namespace oclu {

MeanShiftResult mean_shift(std::span<const Point> points, double bandwidth, int max_iterations) {
  const auto start = std::chrono::steady_clock::now();
  if (!(bandwidth > 0)) throw std::invalid_argument("mean_shift: bandwidth must be > 0");
  const std::size_t n = points.size();
  const double h2 = bandwidth * bandwidth;
  const double stop = 1e-3 * bandwidth;

  MeanShiftResult out;
  auto& r = out.result;
  r.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point c = points[i];
    for (int iter = 0; iter < max_iterations; ++iter) {
      double sx = 0, sy = 0;
      std::size_t count = 0;
      for (const auto& p : points) {
        const double dx = p.x - c.x, dy = p.y - c.y;
        if (dx * dx + dy * dy <= h2) {
          sx += p.x;
          sy += p.y;
          ++count;
        }
      }
      // The window always holds at least the start point at iteration 0;
      // later windows are non-empty because the mean lies in the hull.
      if (count == 0) break;
      const Point next{sx / count, sy / count};
      const double shift = std::hypot(next.x - c.x, next.y - c.y);
      c = next;
      if (shift < stop) break;
    }

    int label = -1;
    for (std::size_t m = 0; m < out.modes.size(); ++m) {
      if (std::hypot(out.modes[m].x - c.x, out.modes[m].y - c.y) < bandwidth / 2) {
        label = static_cast<int>(m);
        break;
      }
    }
    if (label < 0) {
      label = static_cast<int>(out.modes.size());
      out.modes.push_back(c);
    }
    r.labels[i] = label;
  }
  r.k_found = static_cast<int>(out.modes.size());
  r.method = Method::MeanShift;
  r.params_used = {{"bandwidth", bandwidth}};
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace oclu
