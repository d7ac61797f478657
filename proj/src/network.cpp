#include "wvdnet/network.hpp"

#include <cmath>
#include <sstream>

#include "wvdnet/error.hpp"

namespace wvdnet {

NetworkConfig reference_config(const ReferenceOptions& opts) {
  if (opts.conv_channels.empty()) throw InvalidArgument("reference_config: need at least one conv stage");
  NetworkConfig cfg;
  cfg.input_shape = {1, opts.rows, opts.cols};
  cfg.num_classes = opts.num_classes;
  cfg.seed = opts.seed;

  Shape shape{1, opts.rows, opts.cols};
  std::size_t in_ch = 1;
  for (std::size_t out_ch : opts.conv_channels) {
    for (const auto& spec : {LayerSpec::conv2d(in_ch, out_ch, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2d(2, 2)}) {
      shape = layer_output_shape(spec, shape);
      cfg.layers.push_back(spec);
    }
    in_ch = out_ch;
  }
  const std::size_t features = shape_size(shape);
  cfg.layers.push_back(LayerSpec::flatten());
  cfg.layers.push_back(LayerSpec::dropout(opts.dropout));
  cfg.layers.push_back(LayerSpec::linear(features, opts.hidden_units));
  cfg.layers.push_back(LayerSpec::relu());
  cfg.layers.push_back(LayerSpec::dropout(opts.dropout));
  cfg.layers.push_back(LayerSpec::linear(opts.hidden_units, opts.num_classes));
  return cfg;
}

std::vector<Shape> shape_chain(const NetworkConfig& config) {
  if (config.num_classes == 0) throw InvalidArgument("network: num_classes must be positive");
  if (!config.class_names.empty() && config.class_names.size() != config.num_classes) {
    throw InvalidArgument("network: class_names has " + std::to_string(config.class_names.size()) +
                          " entries for " + std::to_string(config.num_classes) + " classes");
  }
  std::vector<Shape> chain;
  chain.push_back({config.input_shape[0], config.input_shape[1], config.input_shape[2]});
  for (const auto& spec : config.layers) chain.push_back(layer_output_shape(spec, chain.back()));
  if (chain.back() != Shape{config.num_classes}) {
    throw InvalidArgument("network: layer chain ends in " + shape_string(chain.back()) + ", expected [" +
                          std::to_string(config.num_classes) + "]");
  }
  return chain;
}

std::string describe(const NetworkConfig& config) {
  std::ostringstream o;
  o << "Net(\n";
  const auto chain = shape_chain(config);
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    o << "  (" << i << "): " << describe(config.layers[i]) << "  -> " << shape_string(chain[i + 1]) << "\n";
  }
  o << ")";
  return o.str();
}

template <typename T>
Network<T>::Network(NetworkConfig config) : config_(std::move(config)) {
  (void)shape_chain(config_);
  Rng rng(config_.seed);
  for (const auto& spec : config_.layers) {
    auto layer = make_layer<T>(spec);
    for (auto& p : layer->params()) {
      if (p.name != "weight") continue;
      const Shape& s = p.value->shape();
      const std::size_t fan_in = p.value->size() / s[0];
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
      for (auto& v : p.value->values()) v = static_cast<T>(rng.uniform(-bound, bound));
    }
    layers_.push_back(std::move(layer));
  }
}

template <typename T>
Network<T>::Network(const Network& other) : config_(other.config_), backend_(other.backend_) {
  for (const auto& l : other.layers_) {
    layers_.push_back(l->clone());
    layers_.back()->clear_cache();
  }
}

template <typename T>
Network<T>& Network<T>::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& x, bool train, Rng& rng) {
  const auto& in = config_.input_shape;
  if (x.rank() != 4 || x.dim(1) != in[0] || x.dim(2) != in[1] || x.dim(3) != in[2]) {
    throw InvalidArgument("network: input " + shape_string(x.shape()) + " does not match [N," +
                          std::to_string(in[0]) + "," + std::to_string(in[1]) + "," + std::to_string(in[2]) + "]");
  }
  Tensor<T> a = x;
  for (auto& layer : layers_) a = layer->forward(a, train, rng, backend_);
  return a;
}

template <typename T>
Tensor<T> Network<T>::forward_eval(const Tensor<T>& x) {
  Rng unused(0);
  return forward(x, false, unused);
}

template <typename T>
Tensor<T> Network<T>::backward(const Tensor<T>& grad_logits, bool need_input_grad) {
  Tensor<T> g = grad_logits;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = layers_[i]->backward(g, i > 0 || need_input_grad, backend_);
  }
  return g;
}

template <typename T>
void Network<T>::zero_grad() {
  for (auto& p : params()) p.grad->fill(T{});
}

template <typename T>
std::vector<Param<T>> Network<T>::params() {
  std::vector<Param<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto p : layers_[i]->params()) {
      p.name = std::to_string(i) + "." + p.name;
      out.push_back(p);
    }
  }
  return out;
}

template <typename T>
std::size_t Network<T>::parameter_count() {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    for (const auto& p : l->params()) n += p.value->size();
  }
  return n;
}

std::size_t argmax_lowest(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

template <typename T>
Prediction predict(Network<T>& net, const Tensor<T>& image) {
  Tensor<T> batch = image;
  if (batch.rank() == 3) {
    batch.reshape({1, image.dim(0), image.dim(1), image.dim(2)});
  } else if (batch.rank() != 4 || batch.dim(0) != 1) {
    throw InvalidArgument("predict: expected one [C,H,W] image, got " + shape_string(image.shape()));
  }
  const Tensor<T> logits = net.forward_eval(batch);
  const std::vector<double> z(logits.values().begin(), logits.values().end());
  Prediction p;
  p.probabilities = softmax(z);
  p.class_index = argmax_lowest(z);
  return p;
}

template class Network<float>;
template class Network<double>;
template Prediction predict<float>(Network<float>&, const Tensor<float>&);
template Prediction predict<double>(Network<double>&, const Tensor<double>&);

}  // namespace wvdnet
