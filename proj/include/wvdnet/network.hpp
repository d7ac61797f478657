#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wvdnet/layers.hpp"

namespace wvdnet {

struct NetworkConfig {
  std::vector<LayerSpec> layers;
  std::array<std::size_t, 3> input_shape{1, 300, 300};  // channels, rows, cols
  std::size_t num_classes = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> class_names;  // optional; size num_classes when present

  bool operator==(const NetworkConfig&) const = default;
};

struct ReferenceOptions {
  std::size_t rows = 300;
  std::size_t cols = 300;
  std::size_t num_classes = 10;
  std::vector<std::size_t> conv_channels{16, 32, 64};
  std::size_t hidden_units = 500;
  double dropout = 0.25;
  std::uint64_t seed = 0;
};

// Three conv(3x3, s1, p1)+relu+maxpool(2,2) stages, flatten, dropout,
// linear+relu, dropout, linear. With the defaults this is the 300x300,
// 10-class classifier whose first linear layer takes 64 * 37 * 37 = 87616
// features.
NetworkConfig reference_config(const ReferenceOptions& opts = {});

// Per-sample shape after every layer, starting with the input shape. Throws
// InvalidArgument when the chain is inconsistent or does not end in
// [num_classes].
std::vector<Shape> shape_chain(const NetworkConfig& config);

// The layer list in a PyTorch-like printout.
std::string describe(const NetworkConfig& config);

template <typename T>
class Network {
 public:
  // Builds layers and draws Kaiming-uniform weights (bound sqrt(6 / fan_in))
  // from config.seed; biases start at zero.
  explicit Network(NetworkConfig config);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const NetworkConfig& config() const { return config_; }

  // x: [N, C, H, W]. Returns logits [N, num_classes]. Activations are cached
  // for one subsequent backward().
  Tensor<T> forward(const Tensor<T>& x, bool train, Rng& rng);
  Tensor<T> forward_eval(const Tensor<T>& x);

  // Accumulates parameter gradients for d(loss)/d(logits) = grad_logits.
  // Returns d(loss)/d(input) when need_input_grad is set.
  Tensor<T> backward(const Tensor<T>& grad_logits, bool need_input_grad = false);

  void zero_grad();
  std::vector<Param<T>> params();
  std::size_t parameter_count();

  kernels::Backend backend() const { return backend_; }
  void set_backend(kernels::Backend b) { backend_ = b; }

 private:
  NetworkConfig config_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  kernels::Backend backend_ = kernels::Backend::omp;
};

struct Prediction {
  std::size_t class_index = 0;
  std::vector<double> probabilities;
};

// Eval-mode forward of one [C,H,W] (or [1,C,H,W]) image. Argmax ties go to
// the lowest class index.
template <typename T>
Prediction predict(Network<T>& net, const Tensor<T>& image);

std::size_t argmax_lowest(std::span<const double> v);

}  // namespace wvdnet
