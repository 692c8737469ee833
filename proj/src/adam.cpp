#include "oclu/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oclu::ad {

template <typename T>
AdamState<T>::AdamState(AdamConfig cfg, std::span<const Tensor<T>> params) : config(cfg) {
  if (!(cfg.learning_rate > 0)) throw std::invalid_argument("adam: learning rate must be > 0");
  m.reserve(params.size());
  v.reserve(params.size());
  for (const auto& p : params) {
    m.emplace_back(p.size(), T{0});
    v.emplace_back(p.size(), T{0});
  }
}

template <typename T>
void adam_step(std::span<Tensor<T>> params, std::span<const Tensor<T>> grads,
               AdamState<T>& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: " + std::to_string(params.size()) + " params, " +
                                std::to_string(grads.size()) + " grads, " +
                                std::to_string(state.m.size()) + " moment slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].size() != params[i].size() || state.m[i].size() != params[i].size()) {
      throw std::invalid_argument("adam_step: size mismatch at parameter " + std::to_string(i));
    }
    for (auto g : grads[i].values()) {
      if (!std::isfinite(g)) {
        throw std::domain_error("adam_step: non-finite gradient at parameter " +
                                std::to_string(i));
      }
    }
  }

  const auto& c = state.config;
  ++state.t;
  const double t = static_cast<double>(state.t);
  const T step = static_cast<T>(c.learning_rate / (1.0 - std::pow(c.beta1, t)));
  const T v_corr = static_cast<T>(1.0 / (1.0 - std::pow(c.beta2, t)));
  const T b1 = static_cast<T>(c.beta1), b2 = static_cast<T>(c.beta2);
  const T eps = static_cast<T>(c.epsilon);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].values();
    auto g = grads[i].values();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = b1 * m[j] + (T{1} - b1) * g[j];
      v[j] = b2 * v[j] + (T{1} - b2) * g[j] * g[j];
      p[j] -= step * m[j] / (std::sqrt(v[j] * v_corr) + eps);
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::span<Tensor<float>>, std::span<const Tensor<float>>,
                               AdamState<float>&);
template void adam_step<double>(std::span<Tensor<double>>, std::span<const Tensor<double>>,
                                AdamState<double>&);

}  // namespace oclu::ad
