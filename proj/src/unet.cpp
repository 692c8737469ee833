#include "oclu/unet.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "oclu/rng.hpp"

namespace oclu {

using ad::Shape;
using ad::Tape;
using ad::Tensor;
using ad::Var;

void UNetConfig::validate() const {
  if (depth < 1) throw std::invalid_argument("unet: depth must be >= 1");
  if (base_filters < 1) throw std::invalid_argument("unet: base_filters must be >= 1");
  if (output_channels < 1) throw std::invalid_argument("unet: output_channels must be >= 1");
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw std::invalid_argument("unet: kernel_size must be odd");
  }
  if (image_size < 1 || image_size % (1 << depth) != 0) {
    throw std::invalid_argument("unet: image_size " + std::to_string(image_size) +
                                " is not divisible by 2^" + std::to_string(depth));
  }
}

UNetConfig UNetConfig::paper() { return UNetConfig{}; }

UNetConfig UNetConfig::desk() {
  UNetConfig c;
  c.depth = 4;
  c.image_size = 64;
  return c;
}

std::size_t UNetModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.size();
  return n;
}

std::vector<std::pair<std::string, Shape>> unet_layout(const UNetConfig& c) {
  c.validate();
  const auto F = static_cast<std::size_t>(c.base_filters);
  const auto k = static_cast<std::size_t>(c.kernel_size);
  std::vector<std::pair<std::string, Shape>> out;
  auto conv = [&](const std::string& name, std::size_t in, std::size_t filters, std::size_t ks) {
    out.emplace_back(name + ".weight", Shape{filters, in, ks, ks});
    out.emplace_back(name + ".bias", Shape{filters});
  };
  for (int l = 0; l < c.depth; ++l) {
    const std::string p = "enc" + std::to_string(l);
    conv(p + ".conv1", l == 0 ? 1 : F, F, k);
    conv(p + ".conv2", F, F, k);
  }
  for (int l = c.depth - 1; l >= 0; --l) {
    const std::string p = "dec" + std::to_string(l);
    conv(p + ".conv1", 2 * F, F, k);
    conv(p + ".conv2", F, F, k);
  }
  conv("head", F, static_cast<std::size_t>(c.output_channels), 1);
  return out;
}

UNetModel build_unet(const UNetConfig& config, std::uint64_t seed) {
  UNetModel m;
  m.config = config;
  Rng rng(derive_seed(seed, "init"));
  for (auto& [name, shape] : unet_layout(config)) {
    Tensor<float> t(shape);
    if (shape.size() == 4) {
      const double fan_in = static_cast<double>(shape[1] * shape[2] * shape[3]);
      const double fan_out = static_cast<double>(shape[0] * shape[2] * shape[3]);
      const double limit = name.rfind("head", 0) == 0 ? std::sqrt(6.0 / (fan_in + fan_out))
                                                       : std::sqrt(6.0 / fan_in);
      for (auto& v : t.values()) v = static_cast<float>(uniform(rng, -limit, limit));
    }
    m.names.push_back(name);
    m.params.push_back(std::move(t));
  }
  return m;
}

template <typename T>
Var unet_forward(Tape<T>& tape, const UNetConfig& c, std::span<const Var> p, Var input) {
  const auto& in = tape.value(input);
  if (in.rank() != 3 || in.dim(0) != 1 || in.dim(1) != static_cast<std::size_t>(c.image_size) ||
      in.dim(2) != static_cast<std::size_t>(c.image_size)) {
    throw std::invalid_argument("unet_forward: expected 1 x " + std::to_string(c.image_size) +
                                " x " + std::to_string(c.image_size) + " input, got " +
                                ad::to_string(in.shape()));
  }
  const std::size_t expected = 8 * static_cast<std::size_t>(c.depth) + 2;
  if (p.size() != expected) throw std::invalid_argument("unet_forward: wrong parameter count");

  std::size_t next = 0;
  auto conv = [&](Var x) {
    const Var w = p[next++];
    const Var b = p[next++];
    return ad::conv2d(tape, x, w, b);
  };

  std::vector<Var> skips;
  Var h = input;
  for (int l = 0; l < c.depth; ++l) {
    h = ad::relu(tape, conv(h));
    h = ad::relu(tape, conv(h));
    skips.push_back(h);
    h = ad::max_pool2x2(tape, h);
  }
  for (int l = c.depth - 1; l >= 0; --l) {
    h = ad::upsample_nearest2x(tape, h);
    h = ad::concat_channels(tape, skips[l], h);
    h = ad::relu(tape, conv(h));
    h = ad::relu(tape, conv(h));
  }
  h = ad::sigmoid(tape, conv(h));
  return ad::pointwise_multiply(tape, h, input);
}

template Var unet_forward<float>(Tape<float>&, const UNetConfig&, std::span<const Var>, Var);
template Var unet_forward<double>(Tape<double>&, const UNetConfig&, std::span<const Var>, Var);

Tensor<float> image_tensor(const BinaryImage& image) {
  const auto n = static_cast<std::size_t>(image.size);
  Tensor<float> t({1, n, n});
  for (std::size_t i = 0; i < image.pixels.size(); ++i) t[i] = image.pixels[i] ? 1.0f : 0.0f;
  return t;
}

Tensor<float> predict_map(const UNetModel& model, const BinaryImage& image) {
  if (image.size != model.config.image_size) {
    throw std::invalid_argument("predict_map: image size " + std::to_string(image.size) +
                                " but model expects " + std::to_string(model.config.image_size));
  }
  Tape<float> tape;
  std::vector<Var> vars;
  for (const auto& p : model.params) vars.push_back(tape.constant(p));
  const Var out = unet_forward(tape, model.config, vars, tape.constant(image_tensor(image)));
  return tape.value(out);
}

Tensor<float> encode_target(const Stimulus& s, int output_channels) {
  if (s.point_set.k > output_channels) {
    throw std::invalid_argument("encode_target: stimulus has " + std::to_string(s.point_set.k) +
                                " clusters but the model has " + std::to_string(output_channels) +
                                " output channels");
  }
  const auto n = static_cast<std::size_t>(s.image_size());
  Tensor<float> t({static_cast<std::size_t>(output_channels), n, n});
  const std::size_t plane = n * n;
  for (std::size_t i = 0; i < plane; ++i) {
    const int label = s.gt_label_map.pixels[i];
    if (label >= 0) t[static_cast<std::size_t>(label) * plane + i] = 1.0f;
  }
  return t;
}

ClusteringResult labels_from_map(const Tensor<float>& map, const PointSet& points) {
  const std::size_t channels = map.dim(0);
  const auto size = static_cast<int>(map.dim(1));
  ClusteringResult r;
  r.method = Method::CNN;
  for (const auto& p : points.points) {
    const auto px = pixel_of(p);
    if (px.x < 0 || px.y < 0 || px.x >= size || px.y >= size) {
      throw std::invalid_argument("labels_from_map: point outside the output map");
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < channels; ++c) {
      if (map.at(c, px.y, px.x) > map.at(best, px.y, px.x)) best = c;
    }
    r.labels.push_back(static_cast<int>(best));
  }
  r.k_found = normalize_labels(r.labels);
  return r;
}

ClusteringResult predict_labels(const UNetModel& model, const Stimulus& stimulus) {
  const auto start = std::chrono::steady_clock::now();
  auto r = labels_from_map(predict_map(model, stimulus.image), stimulus.point_set);
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace oclu
