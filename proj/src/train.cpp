#include "wvdnet/train.hpp"

#include <algorithm>
#include <numeric>

#include "wvdnet/error.hpp"

namespace wvdnet {

void ImageSet::add(std::span<const float> image, std::size_t label) {
  if (image.size() != image_size()) {
    throw InvalidArgument("image set: image has " + std::to_string(image.size()) + " values, expected " +
                          std::to_string(image_size()));
  }
  pixels.insert(pixels.end(), image.begin(), image.end());
  labels.push_back(label);
}

ImageSet ImageSet::subset(std::span<const std::size_t> indices) const {
  ImageSet out;
  out.channels = channels;
  out.rows = rows;
  out.cols = cols;
  for (std::size_t i : indices) out.add(image(i), labels.at(i));
  return out;
}

template <typename T>
Tensor<T> gather_batch(const ImageSet& set, std::span<const std::size_t> indices) {
  Tensor<T> batch({indices.size(), set.channels, set.rows, set.cols});
  const std::size_t sz = set.image_size();
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto img = set.image(indices[b]);
    std::copy(img.begin(), img.end(), batch.data() + b * sz);
  }
  return batch;
}

template <typename T>
Sgd<T>::Sgd(double learning_rate, double momentum) : lr_(learning_rate), momentum_(momentum) {
  if (!(learning_rate >= 0.0)) throw InvalidArgument("sgd: learning rate must be non-negative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("sgd: momentum must be in [0, 1)");
}

template <typename T>
void Sgd<T>::step(Network<T>& net) {
  auto params = net.params();
  if (velocity_.empty()) {
    for (const auto& p : params) velocity_.emplace_back(p.value->size(), T{});
  }
  const T lr = static_cast<T>(lr_);
  const T mu = static_cast<T>(momentum_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto value = params[i].value->values();
    auto grad = params[i].grad->values();
    auto& vel = velocity_[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      vel[j] = mu * vel[j] + grad[j];
      value[j] -= lr * vel[j];
    }
  }
}

template <typename T>
double forward_backward(Network<T>& net, const Tensor<T>& batch, std::span<const std::size_t> labels, bool train,
                        Rng& rng) {
  const std::size_t n = batch.dim(0);
  if (labels.size() != n) throw InvalidArgument("forward_backward: label count does not match batch");
  const Tensor<T> logits = net.forward(batch, train, rng);
  const std::size_t k = logits.dim(1);
  Tensor<T> grad(logits.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = softmax_cross_entropy<T>(std::span<const T>(logits.data() + i * k, k), labels[i]);
    total += r.loss;
    for (std::size_t c = 0; c < k; ++c) grad[i * k + c] = static_cast<T>(r.grad_logits[c] / static_cast<double>(n));
  }
  net.backward(grad);
  return total / static_cast<double>(n);
}

template <typename T>
double mean_loss(Network<T>& net, const Tensor<T>& batch, std::span<const std::size_t> labels) {
  const Tensor<T> logits = net.forward_eval(batch);
  const std::size_t n = batch.dim(0), k = logits.dim(1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += softmax_cross_entropy<T>(std::span<const T>(logits.data() + i * k, k), labels[i]).loss;
  }
  return total / static_cast<double>(n);
}

std::vector<std::size_t> predict_classes(Network<float>& net, const ImageSet& set, std::size_t batch_size) {
  std::vector<std::size_t> out;
  out.reserve(set.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < set.size(); start += batch_size) {
    idx.clear();
    for (std::size_t i = start; i < std::min(set.size(), start + batch_size); ++i) idx.push_back(i);
    const Tensor<float> logits = net.forward_eval(gather_batch<float>(set, idx));
    const std::size_t k = logits.dim(1);
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const std::vector<double> z(logits.data() + b * k, logits.data() + (b + 1) * k);
      out.push_back(argmax_lowest(z));
    }
  }
  return out;
}

double accuracy(Network<float>& net, const ImageSet& set) {
  if (set.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  const auto pred = predict_classes(net, set);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == set.labels[i];
  return static_cast<double>(hits) / static_cast<double>(set.size());
}

namespace {

void check_set(const NetworkConfig& config, const ImageSet& set, const char* which) {
  const auto& in = config.input_shape;
  if (set.channels != in[0] || set.rows != in[1] || set.cols != in[2]) {
    throw InvalidArgument(std::string(which) + " images are " + std::to_string(set.channels) + "x" +
                          std::to_string(set.rows) + "x" + std::to_string(set.cols) + ", network expects " +
                          std::to_string(in[0]) + "x" + std::to_string(in[1]) + "x" + std::to_string(in[2]));
  }
  if (set.pixels.size() != set.size() * set.image_size()) {
    throw InvalidArgument(std::string(which) + " set pixel buffer is inconsistent");
  }
  for (std::size_t label : set.labels) {
    if (label >= config.num_classes) {
      throw InvalidArgument(std::string(which) + " label " + std::to_string(label) + " out of range");
    }
  }
}

}  // namespace

TrainResult train(const NetworkConfig& config, const ImageSet& train_set, const ImageSet& eval_set,
                  const TrainConfig& cfg, kernels::Backend backend,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  if (train_set.size() == 0) throw InvalidArgument("train: empty training set");
  if (cfg.batch_size == 0) throw InvalidArgument("train: batch size must be positive");
  check_set(config, train_set, "training");
  if (eval_set.size() > 0) check_set(config, eval_set, "evaluation");

  Network<float> net(config);
  net.set_backend(backend);
  Sgd<float> sgd(cfg.learning_rate, cfg.momentum);
  Rng rng(cfg.seed);

  TrainResult result{net, net, {}, 0};
  double best_acc = eval_set.size() > 0 ? accuracy(net, eval_set) : -1.0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      std::vector<std::size_t> labels;
      for (std::size_t i : idx) labels.push_back(train_set.labels[i]);
      net.zero_grad();
      const double loss = forward_backward(net, gather_batch<float>(train_set, idx), labels, true, rng);
      sgd.step(net);
      loss_sum += loss * static_cast<double>(idx.size());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    if (eval_set.size() > 0) {
      rec.eval_accuracy = accuracy(net, eval_set);
      if (rec.eval_accuracy > best_acc) {
        best_acc = rec.eval_accuracy;
        result.best = net;
        result.best_epoch = epoch;
      }
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.final_net = net;
  if (eval_set.size() == 0) {
    result.best = net;
    result.best_epoch = cfg.epochs;
  }
  return result;
}

template Tensor<float> gather_batch<float>(const ImageSet&, std::span<const std::size_t>);
template Tensor<double> gather_batch<double>(const ImageSet&, std::span<const std::size_t>);
template class Sgd<float>;
template class Sgd<double>;
template double forward_backward<float>(Network<float>&, const Tensor<float>&, std::span<const std::size_t>, bool,
                                        Rng&);
template double forward_backward<double>(Network<double>&, const Tensor<double>&, std::span<const std::size_t>,
                                         bool, Rng&);
template double mean_loss<float>(Network<float>&, const Tensor<float>&, std::span<const std::size_t>);
template double mean_loss<double>(Network<double>&, const Tensor<double>&, std::span<const std::size_t>);

}  // namespace wvdnet
