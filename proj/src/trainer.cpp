#include "oclu/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "oclu/rng.hpp"

namespace oclu {

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(learning_rate > 0)) throw std::invalid_argument("train: learning rate must be > 0");
  if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
}

namespace {

void check_stimulus(const UNetModel& model, const Stimulus& s, std::size_t index) {
  if (s.image_size() != model.config.image_size) {
    throw std::invalid_argument("stimulus " + std::to_string(index) + " is " +
                                std::to_string(s.image_size()) + " px, model expects " +
                                std::to_string(model.config.image_size));
  }
  if (s.point_set.k > model.config.output_channels) {
    throw std::invalid_argument("stimulus " + std::to_string(index) + " has " +
                                std::to_string(s.point_set.k) + " clusters, model has " +
                                std::to_string(model.config.output_channels) + " output channels");
  }
}

double sample_loss(const UNetModel& model, const Stimulus& s, ad::Tape<float>& tape,
                   std::vector<ad::Var>& vars, bool with_grad) {
  vars.clear();
  for (const auto& p : model.params) {
    vars.push_back(with_grad ? tape.variable(p) : tape.constant(p));
  }
  const auto input = tape.constant(image_tensor(s.image));
  const auto out = unet_forward(tape, model.config, vars, input);
  const auto target = tape.constant(encode_target(s, model.config.output_channels));
  const auto loss = ad::mse_loss(tape, out, target);
  if (with_grad) tape.backward(loss);
  return tape.value(loss)[0];
}

}  // namespace

SampleGradients compute_gradients(const UNetModel& model, const Stimulus& stimulus) {
  check_stimulus(model, stimulus, 0);
  ad::Tape<float> tape;
  std::vector<ad::Var> vars;
  SampleGradients out;
  out.loss = sample_loss(model, stimulus, tape, vars, true);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto g = tape.grad(vars[i]);
    out.grads.emplace_back(model.params[i].shape(), std::vector<float>(g.begin(), g.end()));
  }
  return out;
}

double mean_loss(const UNetModel& model, const std::vector<Stimulus>& data) {
  if (data.empty()) throw std::invalid_argument("mean_loss: empty data set");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    check_stimulus(model, data[i], i);
    ad::Tape<float> tape;
    std::vector<ad::Var> vars;
    sum += sample_loss(model, data[i], tape, vars, false);
  }
  return sum / static_cast<double>(data.size());
}

TrainResult train(UNetModel& model, const std::vector<Stimulus>& data, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("train: empty data set");
  for (std::size_t i = 0; i < data.size(); ++i) check_stimulus(model, data[i], i);

  ad::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  ad::AdamState<float> adam(adam_cfg, model.params);

  std::vector<ad::Tensor<float>> batch_grads;
  for (const auto& p : model.params) batch_grads.emplace_back(p.shape());

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i-- > 1;) {
      std::swap(order[i], order[uniform_int(rng, 0, static_cast<std::int64_t>(i))]);
    }

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      for (auto& g : batch_grads) std::fill(g.values().begin(), g.values().end(), 0.0f);
      for (std::size_t b = start; b < end; ++b) {
        ad::Tape<float> tape;
        std::vector<ad::Var> vars;
        const double loss = sample_loss(model, data[order[b]], tape, vars, true);
        if (!std::isfinite(loss)) {
          throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   " on stimulus " + std::to_string(order[b]));
        }
        epoch_loss += loss;
        for (std::size_t i = 0; i < vars.size(); ++i) {
          const auto g = tape.grad(vars[i]);
          auto acc = batch_grads[i].values();
          for (std::size_t j = 0; j < g.size(); ++j) acc[j] += g[j];
        }
      }
      const float inv = 1.0f / static_cast<float>(end - start);
      for (auto& g : batch_grads) {
        for (auto& v : g.values()) v *= inv;
      }
      ad::adam_step<float>(model.params, batch_grads, adam);
    }
    epoch_loss /= static_cast<double>(data.size());
    result.loss_history.push_back(epoch_loss);
    result.epochs_run = epoch + 1;
    if (on_epoch) on_epoch(epoch, epoch_loss);

    constexpr int kWindow = 5;
    if (config.early_stop && result.loss_history.size() > kWindow) {
      const double past = result.loss_history[result.loss_history.size() - 1 - kWindow];
      if ((past - epoch_loss) / std::max(past, 1e-12) < 1e-4) break;
    }
  }
  return result;
}

}  // namespace oclu
