#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wvdnet/kernels.hpp"
#include "wvdnet/rng.hpp"
#include "wvdnet/tensor.hpp"

namespace wvdnet {

// ---- single-sample layer operations ----------------------------------------
//
// These operate on one example (conv/pool: [C,H,W]; linear: [in]) and carry
// no state. The batched Layer classes below are built on the same kernels.

template <typename T>
struct ConvGrads {
  Tensor<T> grad_input;
  Tensor<T> grad_weights;
  Tensor<T> grad_bias;
};

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const Tensor<T>& weights, const Tensor<T>& bias,
                         std::size_t stride, std::size_t padding,
                         kernels::Backend backend = kernels::Backend::serial);

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& grad_out, const Tensor<T>& input, const Tensor<T>& weights,
                             std::size_t stride, std::size_t padding,
                             kernels::Backend backend = kernels::Backend::serial);

template <typename T>
struct PoolResult {
  Tensor<T> output;
  std::vector<std::uint32_t> argmax;  // flat input index per output element
};

// Floor mode: trailing rows/cols that do not fill a window are dropped.
// Ties resolve to the first maximum in row-major window order.
template <typename T>
PoolResult<T> maxpool2d_forward(const Tensor<T>& input, std::size_t kernel = 2, std::size_t stride = 2);

template <typename T>
Tensor<T> maxpool2d_backward(const Tensor<T>& grad_out, const std::vector<std::uint32_t>& argmax,
                             const Shape& input_shape);

template <typename T>
struct LinearGrads {
  Tensor<T> grad_input;
  Tensor<T> grad_weights;
  Tensor<T> grad_bias;
};

// x is [in] or [N, in]; weights [out, in]; bias [out].
template <typename T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& weights, const Tensor<T>& bias,
                         kernels::Backend backend = kernels::Backend::serial);

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& grad_out, const Tensor<T>& x, const Tensor<T>& weights,
                               kernels::Backend backend = kernels::Backend::serial);

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x);

// Gradient passes where the forward input was strictly positive.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad_out, const Tensor<T>& input);

template <typename T>
struct DropoutResult {
  Tensor<T> output;
  Tensor<T> mask;  // 0 or 1/(1-p) per element; all ones in eval mode
};

// Inverted dropout. Identity in eval mode and whenever p == 0.
template <typename T>
DropoutResult<T> dropout_forward(const Tensor<T>& x, double p, bool train, Rng& rng);

template <typename T>
Tensor<T> dropout_backward(const Tensor<T>& grad_out, const Tensor<T>& mask);

// [N, ...] -> [N, prod(...)]
template <typename T>
Tensor<T> flatten(const Tensor<T>& x);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad_logits;
};

// Numerically stable log-softmax cross entropy; gradient is softmax - onehot.
template <typename T>
LossResult softmax_cross_entropy(std::span<const T> logits, std::size_t label);

std::vector<double> softmax(std::span<const double> logits);

// ---- layer specifications ------------------------------------------------------

enum class LayerKind : std::uint8_t { conv2d = 1, maxpool2d = 2, relu = 3, dropout = 4, flatten = 5, linear = 6 };

std::string to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  double p = 0.0;

  static LayerSpec conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride,
                          std::size_t padding);
  static LayerSpec maxpool2d(std::size_t kernel, std::size_t stride);
  static LayerSpec relu();
  static LayerSpec dropout(double p);
  static LayerSpec flatten();
  static LayerSpec linear(std::size_t in, std::size_t out);

  bool operator==(const LayerSpec&) const = default;
};

// PyTorch-style one-line description, e.g. "Conv2d(1, 16, kernel_size=(3, 3), ...)".
std::string describe(const LayerSpec& spec);

// Per-sample output shape of a layer, validating the input shape.
Shape layer_output_shape(const LayerSpec& spec, const Shape& input);

// ---- batched layers -------------------------------------------------------------

template <typename T>
struct Param {
  std::string name;
  Tensor<T>* value;
  Tensor<T>* grad;
};

// Batched layer with cached activations for one backward pass.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Tensor<T> forward(const Tensor<T>& x, bool train, Rng& rng, kernels::Backend backend) = 0;
  // Accumulates parameter gradients; returns the gradient w.r.t. the input
  // unless need_input_grad is false (then an empty tensor).
  virtual Tensor<T> backward(const Tensor<T>& grad_out, bool need_input_grad, kernels::Backend backend) = 0;
  virtual std::vector<Param<T>> params() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;
  // Drops activations kept for backward().
  virtual void clear_cache() {}
  virtual const LayerSpec& spec() const = 0;
};

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec);

}  // namespace wvdnet
