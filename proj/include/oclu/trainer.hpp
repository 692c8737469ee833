#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "oclu/adam.hpp"
#include "oclu/stimuli.hpp"
#include "oclu/unet.hpp"

namespace oclu {

struct TrainConfig {
  int batch_size = 16;
  double learning_rate = 1e-3;
  int epochs = 30;
  std::uint64_t seed = 0;
  // Batch gradients are reduced in sample-index order; kept as a flag so
  // runs record which mode produced them.
  bool deterministic = true;
  // Stop once the epoch loss improved by less than 1e-4 (relative) over the
  // last 5 epochs.
  bool early_stop = false;

  void validate() const;
};

struct TrainResult {
  std::vector<double> loss_history;  // mean per-sample loss of each epoch
  int epochs_run = 0;
};

struct SampleGradients {
  double loss = 0.0;
  std::vector<ad::Tensor<float>> grads;  // one per model parameter
};

// Forward, MSE against the one-hot target, backward for a single stimulus.
SampleGradients compute_gradients(const UNetModel& model, const Stimulus& stimulus);

// Mean MSE over a set of stimuli, no gradients.
double mean_loss(const UNetModel& model, const std::vector<Stimulus>& data);

using EpochCallback = std::function<void(int epoch, double loss)>;

// Mini-batch Adam on the MSE loss; throws std::runtime_error on a non-finite
// loss.
TrainResult train(UNetModel& model, const std::vector<Stimulus>& data, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace oclu
