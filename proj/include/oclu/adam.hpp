#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oclu/autodiff.hpp"

namespace oclu::ad {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment estimates for a list of parameters, in parameter order.
template <typename T>
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  std::uint64_t t = 0;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::span<const Tensor<T>> params);
};

// One bias-corrected Adam update. Every gradient is checked for finiteness
// before any parameter is touched; a non-finite entry throws
// std::domain_error and leaves params and state unchanged.
template <typename T>
void adam_step(std::span<Tensor<T>> params, std::span<const Tensor<T>> grads,
               AdamState<T>& state);

}  // namespace oclu::ad
