#pragma once

// Generators and small helpers shared by the unit tests.

#include <cstdint>
#include <vector>

#include "oclu/autodiff.hpp"
#include "oclu/rng.hpp"
#include "oclu/stimuli.hpp"

namespace testing {

// Integer-valued entries in [lo, hi]; sums and products of these stay exact
// in double precision.
inline oclu::ad::Tensor<double> int_tensor(oclu::ad::Shape shape, oclu::Rng& rng, int lo = -4,
                                           int hi = 4) {
  oclu::ad::Tensor<double> t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<double>(oclu::uniform_int(rng, lo, hi));
  return t;
}

inline std::vector<int> random_partition(oclu::Rng& rng, std::size_t n, int k) {
  std::vector<int> out(n);
  for (auto& v : out) v = static_cast<int>(oclu::uniform_int(rng, 0, k - 1));
  return out;
}

inline std::vector<oclu::Point> random_points(oclu::Rng& rng, std::size_t n, double lo = 0.0,
                                              double hi = 64.0) {
  std::vector<oclu::Point> out(n);
  for (auto& p : out) p = {oclu::uniform(rng, lo, hi), oclu::uniform(rng, lo, hi)};
  return out;
}

// Isotropic Gaussian blob.
inline void add_blob(std::vector<oclu::Point>& pts, std::vector<int>& labels, oclu::Rng& rng,
                     oclu::Point c, double sd, int n, int label) {
  for (int i = 0; i < n; ++i) {
    pts.push_back({c.x + sd * oclu::standard_normal(rng), c.y + sd * oclu::standard_normal(rng)});
    labels.push_back(label);
  }
}

}  // namespace testing
