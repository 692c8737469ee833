#pragma once

// Reverse-mode automatic differentiation over dense tensors.
//
// A Tape records every operation applied to its variables in creation order.
// backward() walks the record in reverse and accumulates gradients into the
// grad slot of each tensor that requires one. Only the operator set needed
// by the U-Net clusterer is provided.

#include <cstddef>
#include <functional>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace oclu::ad {

using Shape = std::vector<std::size_t>;

// Cache-line aligned storage. Vectorized reductions peel a different number
// of leading elements for different start addresses, which changes float
// rounding; fixed alignment keeps results independent of heap state.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
};

template <typename T>
using Buffer = std::vector<T, AlignedAllocator<T>>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{0});
  Tensor(Shape shape, std::vector<T> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return values_.size(); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  // Element of a rank-3 (channels x height x width) tensor.
  T& at(std::size_t c, std::size_t y, std::size_t x) {
    return values_[(c * shape_[1] + y) * shape_[2] + x];
  }
  const T& at(std::size_t c, std::size_t y, std::size_t x) const {
    return values_[(c * shape_[1] + y) * shape_[2] + x];
  }

  bool has_grad() const { return has_grad_; }
  // Allocates a zeroed gradient slot if absent.
  std::span<T> grad();
  std::span<const T> grad() const { return grad_; }
  void zero_grad();
  void drop_grad() {
    grad_.clear();
    grad_.shrink_to_fit();
    has_grad_ = false;
  }

  template <typename U>
  Tensor<U> cast() const {
    return Tensor<U>(shape_, std::vector<U>(values_.begin(), values_.end()));
  }

 private:
  Shape shape_;
  Buffer<T> values_;
  Buffer<T> grad_;
  bool has_grad_ = false;
};

struct Var {
  std::size_t id = 0;
};

template <typename T>
class Tape {
 public:
  using Backward = std::function<void(Tape&)>;

  // A leaf that never receives a gradient.
  Var constant(Tensor<T> value);
  // A leaf whose gradient is accumulated by backward().
  Var variable(Tensor<T> value);

  Var record(Tensor<T> value, std::initializer_list<Var> parents, Backward backward);

  const Tensor<T>& value(Var v) const { return nodes_.at(v.id).value; }
  Tensor<T>& node_tensor(Var v) { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  std::span<T> grad(Var v) { return nodes_.at(v.id).value.grad(); }
  std::span<const T> grad(Var v) const { return nodes_.at(v.id).value.grad(); }

  // Seeds d(out)/d(out) = 1; `out` must hold a single element.
  void backward(Var out);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    bool requires_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

// Same-padded 2-D cross-correlation. input C x H x W, kernel F x C x k x k
// (k odd), bias F. Output F x H x W.
template <typename T>
Var conv2d(Tape<T>& tape, Var input, Var kernel, Var bias);

// 2x2 window max with stride 2; ties resolve to the first element in
// row-major window order.
template <typename T>
Var max_pool2x2(Tape<T>& tape, Var input);

template <typename T>
Var upsample_nearest2x(Tape<T>& tape, Var input);

template <typename T>
Var relu(Tape<T>& tape, Var input);

template <typename T>
Var sigmoid(Tape<T>& tape, Var input);

template <typename T>
Var concat_channels(Tape<T>& tape, Var a, Var b);

// Elementwise product. `b` has the shape of `a`, or 1 x H x W and is
// broadcast over the channels of `a`.
template <typename T>
Var pointwise_multiply(Tape<T>& tape, Var a, Var b);

// Mean of squared differences; returns a single-element tensor.
template <typename T>
Var mse_loss(Tape<T>& tape, Var pred, Var target);

// sum_i weights[i] * input[i]; `weights` is treated as a constant.
template <typename T>
Var weighted_sum(Tape<T>& tape, Var input, const Tensor<T>& weights);

}  // namespace oclu::ad
