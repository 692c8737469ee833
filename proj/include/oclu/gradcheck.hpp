#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "oclu/autodiff.hpp"

namespace oclu::ad {

// Builds a graph on `tape` from leaf variables (one per input tensor) and
// returns its output. Non-scalar outputs are reduced by the checker with a
// fixed pseudo-random weighting.
using GraphFn = std::function<Var(Tape<double>&, std::span<const Var>)>;

struct GradCheckReport {
  std::vector<double> max_rel_error;  // one entry per input tensor
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Compares backprop gradients against central differences
// (f(x+h) - f(x-h)) / 2h, element by element. Relative error is
// |a - b| / max(|a|, |b|, 1e-8).
GradCheckReport finite_diff_check(const GraphFn& graph, std::vector<Tensor<double>> inputs,
                                  double h = 1e-5, double tol = 1e-4);

}  // namespace oclu::ad

namespace oclu {

struct NamedGradCheck {
  std::string name;
  ad::GradCheckReport report;
};

// Finite-difference checks of every operator and of a depth-2, 8 x 8 U-Net
// with an MSE loss. Inputs are drawn from `seed` and kept away from ReLU
// kinks and pooling ties.
std::vector<NamedGradCheck> gradient_check_suite(std::uint64_t seed, double h = 1e-5,
                                                 double tol = 1e-4);

}  // namespace oclu
