#pragma once

#include <functional>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "wvdnet/network.hpp"

namespace wvdnet {

// Images of one shape with class labels, stored contiguously.
struct ImageSet {
  std::size_t channels = 1;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> pixels;  // size() * channels * rows * cols
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t image_size() const { return channels * rows * cols; }
  std::span<const float> image(std::size_t i) const { return {pixels.data() + i * image_size(), image_size()}; }

  void add(std::span<const float> image, std::size_t label);
  ImageSet subset(std::span<const std::size_t> indices) const;
};

template <typename T>
Tensor<T> gather_batch(const ImageSet& set, std::span<const std::size_t> indices);

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::uint64_t seed = 0;
};

// SGD with classical momentum: v <- momentum * v + g;  w <- w - lr * v.
template <typename T>
class Sgd {
 public:
  Sgd(double learning_rate, double momentum);
  void step(Network<T>& net);

 private:
  double lr_;
  double momentum_;
  std::vector<std::vector<T>> velocity_;
};

// Mean cross-entropy over a batch and its gradient, accumulated into net.
// Returns the mean loss.
template <typename T>
double forward_backward(Network<T>& net, const Tensor<T>& batch, std::span<const std::size_t> labels, bool train,
                        Rng& rng);

// Mean cross-entropy without touching gradients.
template <typename T>
double mean_loss(Network<T>& net, const Tensor<T>& batch, std::span<const std::size_t> labels);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double eval_accuracy = std::numeric_limits<double>::quiet_NaN();  // NaN without an eval set
};

struct TrainResult {
  Network<float> best;        // highest eval accuracy (earliest on ties); final when no eval set
  Network<float> final_net;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 0 = initial weights
};

// Mini-batch SGD with momentum. The shuffle order and dropout masks come from
// cfg.seed, weight init from config.seed, so identical seeds reproduce the
// run bit for bit.
TrainResult train(const NetworkConfig& config, const ImageSet& train_set, const ImageSet& eval_set,
                  const TrainConfig& cfg, kernels::Backend backend = kernels::Backend::omp,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

// Eval-mode predictions, batched.
std::vector<std::size_t> predict_classes(Network<float>& net, const ImageSet& set, std::size_t batch_size = 32);
double accuracy(Network<float>& net, const ImageSet& set);

}  // namespace wvdnet
