#pragma once

// Encoder-decoder clustering network with mirrored skip connections.
//
//   encoder, per level:  conv-ReLU, conv-ReLU, 2x2 max-pool
//   decoder, per level:  2x upsample, concat(skip, up), conv-ReLU, conv-ReLU
//   head:                1x1 conv to one channel per cluster, sigmoid,
//                        multiplied by the input image
//
// Parameters are stored as f32; the forward pass is templated so the same
// graph can be built in f64 for gradient checking.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "oclu/autodiff.hpp"
#include "oclu/clustering.hpp"
#include "oclu/stimuli.hpp"

namespace oclu {

struct UNetConfig {
  int depth = 5;
  int base_filters = 16;
  int output_channels = 3;
  int image_size = 128;
  int kernel_size = 3;

  void validate() const;
  bool operator==(const UNetConfig&) const = default;

  // 128 x 128 input, five levels.
  static UNetConfig paper();
  // 64 x 64 input, four levels.
  static UNetConfig desk();
};

struct UNetModel {
  UNetConfig config;
  std::vector<std::string> names;
  std::vector<ad::Tensor<float>> params;

  std::size_t parameter_count() const;
};

// Parameter names and shapes implied by a config, in storage order.
std::vector<std::pair<std::string, ad::Shape>> unet_layout(const UNetConfig& config);

// He-uniform init for ReLU convs, Glorot-uniform for the sigmoid head, zero
// biases.
UNetModel build_unet(const UNetConfig& config, std::uint64_t seed);

template <typename T>
ad::Var unet_forward(ad::Tape<T>& tape, const UNetConfig& config, std::span<const ad::Var> params,
                     ad::Var input);

ad::Tensor<float> image_tensor(const BinaryImage& image);

// Output map (output_channels x size x size) for one image, no gradients.
ad::Tensor<float> predict_map(const UNetModel& model, const BinaryImage& image);

// One-hot target: channel c is 1 where the ground-truth label is c.
ad::Tensor<float> encode_target(const Stimulus& stimulus, int output_channels);

// Argmax over channels at each point's pixel, lowest channel on ties.
// Labels are renumbered by first appearance; k_found counts the channels used.
ClusteringResult predict_labels(const UNetModel& model, const Stimulus& stimulus);
ClusteringResult labels_from_map(const ad::Tensor<float>& map, const PointSet& points);

inline constexpr char kCheckpointMagic[4] = {'O', 'C', 'L', 'U'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const UNetModel& model, const std::filesystem::path& path);
UNetModel load_checkpoint(const std::filesystem::path& path);

}  // namespace oclu
