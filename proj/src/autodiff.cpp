#include "oclu/autodiff.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace oclu::ad {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : shape_(std::move(shape)), values_(numel(shape_), fill) {}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (values_.size() != numel(shape_)) {
    throw std::invalid_argument("tensor: " + std::to_string(values_.size()) +
                                " values do not fill shape " + to_string(shape_));
  }
}

template <typename T>
std::span<T> Tensor<T>::grad() {
  if (!has_grad_) {
    grad_.assign(values_.size(), T{0});
    has_grad_ = true;
  }
  return grad_;
}

template <typename T>
void Tensor<T>::zero_grad() {
  grad_.assign(values_.size(), T{0});
  has_grad_ = true;
}

template <typename T>
Var Tape<T>::constant(Tensor<T> value) {
  nodes_.push_back(Node{std::move(value), false, {}});
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::variable(Tensor<T> value) {
  nodes_.push_back(Node{std::move(value), true, {}});
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::record(Tensor<T> value, std::initializer_list<Var> parents, Backward backward) {
  bool needs = false;
  for (auto p : parents) needs = needs || nodes_.at(p.id).requires_grad;
  nodes_.push_back(Node{std::move(value), needs, needs ? std::move(backward) : Backward{}});
  return Var{nodes_.size() - 1};
}

template <typename T>
void Tape<T>::backward(Var out) {
  auto& root = nodes_.at(out.id);
  if (root.value.size() != 1) {
    throw std::invalid_argument("backward: output must be a single element, got shape " +
                                to_string(root.value.shape()));
  }
  if (!root.requires_grad) return;
  root.value.grad()[0] += T{1};
  for (std::size_t i = out.id + 1; i-- > 0;) {
    auto& node = nodes_[i];
    if (node.backward && node.value.has_grad()) node.backward(*this);
  }
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMatrix<T>>;

void require_rank3(const Shape& s, const char* op) {
  if (s.size() != 3) {
    throw std::invalid_argument(std::string(op) + ": expected C x H x W, got " + to_string(s));
  }
}

// Unfolds a C x H x W image into a (C*k*k) x (H*W) patch matrix with
// zero padding of (k-1)/2.
template <typename T>
void im2col(const T* img, std::size_t channels, std::size_t height, std::size_t width,
            std::size_t k, T* cols) {
  const long pad = static_cast<long>(k / 2);
  const long h = static_cast<long>(height), w = static_cast<long>(width);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* row = cols + ((c * k + ky) * k + kx) * height * width;
        const long dy = static_cast<long>(ky) - pad;
        const long dx = static_cast<long>(kx) - pad;
        const long x0 = std::max(0L, -dx), x1 = std::min(w, w - dx);
        for (long y = 0; y < h; ++y) {
          T* out = row + y * w;
          const long iy = y + dy;
          if (iy < 0 || iy >= h || x0 >= x1) {
            std::fill(out, out + w, T{0});
            continue;
          }
          const T* in = img + (c * height + iy) * width;
          std::fill(out, out + x0, T{0});
          std::copy(in + x0 + dx, in + x1 + dx, out + x0);
          std::fill(out + x1, out + w, T{0});
        }
      }
    }
  }
}

// Adjoint of im2col: scatters patch-matrix gradients back onto the image.
template <typename T>
void col2im_add(const T* cols, std::size_t channels, std::size_t height, std::size_t width,
                std::size_t k, T* img) {
  const long pad = static_cast<long>(k / 2);
  const long h = static_cast<long>(height), w = static_cast<long>(width);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* row = cols + ((c * k + ky) * k + kx) * height * width;
        const long dy = static_cast<long>(ky) - pad;
        const long dx = static_cast<long>(kx) - pad;
        const long x0 = std::max(0L, -dx), x1 = std::min(w, w - dx);
        for (long y = 0; y < h; ++y) {
          const long iy = y + dy;
          if (iy < 0 || iy >= h) continue;
          const T* in = row + y * w;
          T* out = img + (c * height + iy) * width;
          for (long x = x0; x < x1; ++x) out[x + dx] += in[x];
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Var conv2d(Tape<T>& tape, Var input, Var kernel, Var bias) {
  const auto& x = tape.value(input);
  const auto& w = tape.value(kernel);
  const auto& b = tape.value(bias);
  require_rank3(x.shape(), "conv2d");
  if (w.rank() != 4 || w.dim(1) != x.dim(0) || w.dim(2) != w.dim(3) || w.dim(2) % 2 == 0) {
    throw std::invalid_argument("conv2d: kernel " + to_string(w.shape()) +
                                " incompatible with input " + to_string(x.shape()));
  }
  if (b.rank() != 1 || b.dim(0) != w.dim(0)) {
    throw std::invalid_argument("conv2d: bias " + to_string(b.shape()) + " for " +
                                std::to_string(w.dim(0)) + " filters");
  }
  const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const std::size_t F = w.dim(0), k = w.dim(2);
  const std::size_t rows = C * k * k, pixels = H * W;

  Buffer<T> cols;
  const T* patches = x.data();
  if (k != 1) {
    cols.resize(rows * pixels);
    im2col(x.data(), C, H, W, k, cols.data());
    patches = cols.data();
  }

  Tensor<T> out({F, H, W});
  MatMap<T> y(out.data(), F, pixels);
  y.noalias() = ConstMatMap<T>(w.data(), F, rows) * ConstMatMap<T>(patches, rows, pixels);
  for (std::size_t f = 0; f < F; ++f) y.row(f).array() += b[f];

  auto self = Var{tape.size()};
  return tape.record(
      std::move(out), {input, kernel, bias},
      [=, cols = std::move(cols)](Tape<T>& t) {
        const auto& xv = t.value(input);
        const auto& wv = t.value(kernel);
        const T* pv = k == 1 ? xv.data() : cols.data();
        ConstMatMap<T> dy(t.grad(self).data(), F, pixels);
        if (t.requires_grad(bias)) {
          auto db = t.grad(bias);
          for (std::size_t f = 0; f < F; ++f) db[f] += dy.row(f).sum();
        }
        if (t.requires_grad(kernel)) {
          MatMap<T> dw(t.grad(kernel).data(), F, rows);
          dw.noalias() += dy * ConstMatMap<T>(pv, rows, pixels).transpose();
        }
        if (t.requires_grad(input)) {
          auto dx = t.grad(input);
          if (k == 1) {
            MatMap<T> dxm(dx.data(), rows, pixels);
            dxm.noalias() += ConstMatMap<T>(wv.data(), F, rows).transpose() * dy;
          } else {
            RowMatrix<T> dcols = ConstMatMap<T>(wv.data(), F, rows).transpose() * dy;
            col2im_add(dcols.data(), C, H, W, k, dx.data());
          }
        }
      });
}

template <typename T>
Var max_pool2x2(Tape<T>& tape, Var input) {
  const auto& x = tape.value(input);
  require_rank3(x.shape(), "max_pool2x2");
  const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
  if (H % 2 || W % 2) {
    throw std::invalid_argument("max_pool2x2: odd spatial size " + to_string(x.shape()));
  }
  const std::size_t h = H / 2, w = W / 2;
  Tensor<T> out({C, h, w});
  std::vector<std::uint32_t> argmax(out.size());
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        const std::size_t base = (c * H + 2 * y) * W + 2 * xx;
        const std::size_t cand[4] = {base, base + 1, base + W, base + W + 1};
        std::size_t best = cand[0];
        for (int i = 1; i < 4; ++i) {
          if (x[cand[i]] > x[best]) best = cand[i];
        }
        const std::size_t o = (c * h + y) * w + xx;
        out[o] = x[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  auto self = Var{tape.size()};
  return tape.record(std::move(out), {input}, [=, argmax = std::move(argmax)](Tape<T>& t) {
    auto g = t.grad(self);
    auto dx = t.grad(input);
    for (std::size_t i = 0; i < g.size(); ++i) dx[argmax[i]] += g[i];
  });
}

template <typename T>
Var upsample_nearest2x(Tape<T>& tape, Var input) {
  const auto& x = tape.value(input);
  require_rank3(x.shape(), "upsample_nearest2x");
  const std::size_t C = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t H = 2 * h, W = 2 * w;
  Tensor<T> out({C, H, W});
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t y = 0; y < H; ++y) {
      const T* src = x.data() + (c * h + y / 2) * w;
      T* dst = out.data() + (c * H + y) * W;
      for (std::size_t xx = 0; xx < W; ++xx) dst[xx] = src[xx / 2];
    }
  }
  auto self = Var{tape.size()};
  return tape.record(std::move(out), {input}, [=](Tape<T>& t) {
    auto g = t.grad(self);
    auto dx = t.grad(input);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t y = 0; y < H; ++y) {
        const T* src = g.data() + (c * H + y) * W;
        T* dst = dx.data() + (c * h + y / 2) * w;
        for (std::size_t xx = 0; xx < W; ++xx) dst[xx / 2] += src[xx];
      }
    }
  });
}

template <typename T>
Var relu(Tape<T>& tape, Var input) {
  const auto& x = tape.value(input);
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T{0} ? x[i] : T{0};
  auto self = Var{tape.size()};
  return tape.record(std::move(out), {input}, [=](Tape<T>& t) {
    const auto& y = t.value(self);
    auto g = t.grad(self);
    auto dx = t.grad(input);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (y[i] > T{0}) dx[i] += g[i];
    }
  });
}

template <typename T>
Var sigmoid(Tape<T>& tape, Var input) {
  const auto& x = tape.value(input);
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = T{1} / (T{1} + std::exp(-x[i]));
  auto self = Var{tape.size()};
  return tape.record(std::move(out), {input}, [=](Tape<T>& t) {
    const auto& y = t.value(self);
    auto g = t.grad(self);
    auto dx = t.grad(input);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * y[i] * (T{1} - y[i]);
  });
}

template <typename T>
Var concat_channels(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  require_rank3(av.shape(), "concat_channels");
  require_rank3(bv.shape(), "concat_channels");
  if (av.dim(1) != bv.dim(1) || av.dim(2) != bv.dim(2)) {
    throw std::invalid_argument("concat_channels: spatial mismatch " + to_string(av.shape()) +
                                " vs " + to_string(bv.shape()));
  }
  Tensor<T> out({av.dim(0) + bv.dim(0), av.dim(1), av.dim(2)});
  std::copy(av.values().begin(), av.values().end(), out.values().begin());
  std::copy(bv.values().begin(), bv.values().end(), out.values().begin() + av.size());
  const std::size_t split = av.size();
  auto self = Var{tape.size()};
  return tape.record(std::move(out), {a, b}, [=](Tape<T>& t) {
    auto g = t.grad(self);
    if (t.requires_grad(a)) {
      auto da = t.grad(a);
      for (std::size_t i = 0; i < split; ++i) da[i] += g[i];
    }
    if (t.requires_grad(b)) {
      auto db = t.grad(b);
      for (std::size_t i = split; i < g.size(); ++i) db[i - split] += g[i];
    }
  });
}

template <typename T>
Var pointwise_multiply(Tape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  const bool same = av.shape() == bv.shape();
  const bool broadcast = av.rank() == 3 && bv.rank() == 3 && bv.dim(0) == 1 &&
                         av.dim(1) == bv.dim(1) && av.dim(2) == bv.dim(2);
  if (!same && !broadcast) {
    throw std::invalid_argument("pointwise_multiply: cannot combine " + to_string(av.shape()) +
                                " with " + to_string(bv.shape()));
  }
  const std::size_t plane = same ? av.size() : bv.size();
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i % plane];
  auto self = Var{tape.size()};
  return tape.record(std::move(out), {a, b}, [=](Tape<T>& t) {
    const auto& x = t.value(a);
    const auto& m = t.value(b);
    auto g = t.grad(self);
    if (t.requires_grad(a)) {
      auto da = t.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * m[i % plane];
    }
    if (t.requires_grad(b)) {
      auto db = t.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) db[i % plane] += g[i] * x[i];
    }
  });
}

template <typename T>
Var mse_loss(Tape<T>& tape, Var pred, Var target) {
  const auto& p = tape.value(pred);
  const auto& q = tape.value(target);
  if (p.shape() != q.shape()) {
    throw std::invalid_argument("mse_loss: shape mismatch " + to_string(p.shape()) + " vs " +
                                to_string(q.shape()));
  }
  if (p.size() == 0) throw std::invalid_argument("mse_loss: empty tensors");
  T sum{0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const T d = p[i] - q[i];
    sum += d * d;
  }
  const T n = static_cast<T>(p.size());
  auto self = Var{tape.size()};
  return tape.record(Tensor<T>({1}, {sum / n}), {pred, target}, [=](Tape<T>& t) {
    const auto& pv = t.value(pred);
    const auto& qv = t.value(target);
    const T scale = T{2} * t.grad(self)[0] / n;
    if (t.requires_grad(pred)) {
      auto dp = t.grad(pred);
      for (std::size_t i = 0; i < dp.size(); ++i) dp[i] += scale * (pv[i] - qv[i]);
    }
    if (t.requires_grad(target)) {
      auto dq = t.grad(target);
      for (std::size_t i = 0; i < dq.size(); ++i) dq[i] -= scale * (pv[i] - qv[i]);
    }
  });
}

template <typename T>
Var weighted_sum(Tape<T>& tape, Var input, const Tensor<T>& weights) {
  const auto& x = tape.value(input);
  if (x.size() != weights.size()) {
    throw std::invalid_argument("weighted_sum: " + std::to_string(weights.size()) +
                                " weights for " + std::to_string(x.size()) + " values");
  }
  T sum{0};
  for (std::size_t i = 0; i < x.size(); ++i) sum += weights[i] * x[i];
  auto self = Var{tape.size()};
  return tape.record(Tensor<T>({1}, {sum}), {input}, [=, w = weights](Tape<T>& t) {
    const T g = t.grad(self)[0];
    auto dx = t.grad(input);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g * w[i];
  });
}

#define OCLU_INSTANTIATE_OPS(T)                                            \
  template Var conv2d<T>(Tape<T>&, Var, Var, Var);                         \
  template Var max_pool2x2<T>(Tape<T>&, Var);                              \
  template Var upsample_nearest2x<T>(Tape<T>&, Var);                       \
  template Var relu<T>(Tape<T>&, Var);                                     \
  template Var sigmoid<T>(Tape<T>&, Var);                                  \
  template Var concat_channels<T>(Tape<T>&, Var, Var);                     \
  template Var pointwise_multiply<T>(Tape<T>&, Var, Var);                  \
  template Var mse_loss<T>(Tape<T>&, Var, Var);                            \
  template Var weighted_sum<T>(Tape<T>&, Var, const Tensor<T>&);

OCLU_INSTANTIATE_OPS(float)
OCLU_INSTANTIATE_OPS(double)

#undef OCLU_INSTANTIATE_OPS

}  // namespace oclu::ad
