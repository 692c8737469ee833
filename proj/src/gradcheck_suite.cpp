#include <algorithm>
#include <numeric>

#include "oclu/gradcheck.hpp"
#include "oclu/rng.hpp"
#include "oclu/unet.hpp"

namespace oclu {

using ad::Shape;
using ad::Tape;
using ad::Tensor;
using ad::Var;

namespace {

Tensor<double> random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.values()) v = uniform(rng, lo, hi);
  return t;
}

// Values at least `gap` away from zero.
Tensor<double> off_kink(Shape shape, Rng& rng, double gap = 0.05) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.values()) {
    const double m = uniform(rng, gap, 1.0);
    v = uniform(rng, 0.0, 1.0) < 0.5 ? -m : m;
  }
  return t;
}

// A shuffled ramp: all entries distinct, neighbours at least 0.05 apart.
Tensor<double> tie_free(Shape shape, Rng& rng) {
  Tensor<double> t(std::move(shape));
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1))]);
  }
  for (std::size_t i = 0; i < t.size(); ++i) t[order[i]] = -1.0 + 0.05 * static_cast<double>(i);
  return t;
}

}  // namespace

std::vector<NamedGradCheck> gradient_check_suite(std::uint64_t seed, double h, double tol) {
  Rng rng = make_rng(seed, "gradcheck");
  std::vector<NamedGradCheck> out;
  auto check = [&](std::string name, const ad::GraphFn& g, std::vector<Tensor<double>> inputs) {
    out.push_back({std::move(name), ad::finite_diff_check(g, std::move(inputs), h, tol)});
  };

  for (std::size_t k : {1u, 3u, 5u}) {
    check("conv2d k=" + std::to_string(k),
          [](Tape<double>& t, std::span<const Var> v) { return ad::conv2d(t, v[0], v[1], v[2]); },
          {random_tensor({2, 5, 6}, rng), random_tensor({3, 2, k, k}, rng), random_tensor({3}, rng)});
  }
  check("max_pool2x2",
        [](Tape<double>& t, std::span<const Var> v) { return ad::max_pool2x2(t, v[0]); },
        {tie_free({2, 4, 6}, rng)});
  check("upsample_nearest2x",
        [](Tape<double>& t, std::span<const Var> v) { return ad::upsample_nearest2x(t, v[0]); },
        {random_tensor({2, 3, 3}, rng)});
  check("relu", [](Tape<double>& t, std::span<const Var> v) { return ad::relu(t, v[0]); },
        {off_kink({2, 4, 4}, rng)});
  check("sigmoid", [](Tape<double>& t, std::span<const Var> v) { return ad::sigmoid(t, v[0]); },
        {random_tensor({2, 4, 4}, rng, -4.0, 4.0)});
  check("concat_channels",
        [](Tape<double>& t, std::span<const Var> v) { return ad::concat_channels(t, v[0], v[1]); },
        {random_tensor({2, 3, 3}, rng), random_tensor({1, 3, 3}, rng)});
  check("pointwise_multiply",
        [](Tape<double>& t, std::span<const Var> v) { return ad::pointwise_multiply(t, v[0], v[1]); },
        {random_tensor({2, 3, 3}, rng), random_tensor({2, 3, 3}, rng)});
  check("pointwise_multiply broadcast",
        [](Tape<double>& t, std::span<const Var> v) { return ad::pointwise_multiply(t, v[0], v[1]); },
        {random_tensor({3, 3, 3}, rng), random_tensor({1, 3, 3}, rng)});
  check("mse_loss",
        [](Tape<double>& t, std::span<const Var> v) { return ad::mse_loss(t, v[0], v[1]); },
        {random_tensor({2, 3, 3}, rng), random_tensor({2, 3, 3}, rng)});
  {
    auto w = random_tensor({2, 3, 3}, rng);
    check("weighted_sum",
          [w](Tape<double>& t, std::span<const Var> v) { return ad::weighted_sum(t, v[0], w); },
          {random_tensor({2, 3, 3}, rng)});
  }

  // Small U-Net, loss against a random one-hot target on a random image.
  UNetConfig c;
  c.depth = 2;
  c.base_filters = 2;
  c.output_channels = 3;
  c.image_size = 8;
  const auto model = build_unet(c, derive_seed(seed, "gradcheck-unet"));
  Tensor<double> image({1, 8, 8});
  Tensor<double> target({3, 8, 8});
  for (std::size_t i = 0; i < 64; ++i) {
    image[i] = uniform(rng, 0.0, 1.0) < 0.5 ? 1.0 : 0.0;
    if (image[i] > 0) target[static_cast<std::size_t>(uniform_int(rng, 0, 2)) * 64 + i] = 1.0;
  }
  std::vector<Tensor<double>> params;
  for (const auto& p : model.params) {
    auto d = p.cast<double>();
    // Nonzero biases so that no unit starts exactly at a kink.
    if (d.rank() == 1) {
      for (auto& v : d.values()) v = uniform(rng, -0.1, 0.1);
    }
    params.push_back(std::move(d));
  }
  check("unet depth=2 8x8",
        [c, image, target](Tape<double>& t, std::span<const Var> v) {
          const Var y = unet_forward(t, c, v, t.constant(image));
          return ad::mse_loss(t, y, t.constant(target));
        },
        std::move(params));
  return out;
}

}  // namespace oclu
