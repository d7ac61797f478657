#pragma once

// Finite-difference checks for the batched layers and whole networks, in
// double precision. Loss is <y, R> for a fixed random R, so dL/dy = R.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "wvdnet/layers.hpp"
#include "wvdnet/network.hpp"
#include "wvdnet/rng.hpp"

namespace gradcheck {

using wvdnet::Layer;
using wvdnet::LayerSpec;
using wvdnet::Rng;
using wvdnet::Shape;
using wvdnet::Tensor;

struct Result {
  double input_error = 0.0;
  double param_error = 0.0;
  double worst() const { return std::max(input_error, param_error); }
};

inline Tensor<double> random_tensor(const Shape& s, Rng& rng, double margin = 0.0) {
  Tensor<double> t(s);
  for (auto& v : t.values()) {
    v = rng.uniform(-1, 1);
    // keep away from relu kinks when asked
    if (std::abs(v) < margin) v = v < 0 ? v - margin : v + margin;
  }
  return t;
}

inline double dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// batch_shape includes the leading batch dimension.
inline Result check_layer(const LayerSpec& spec, const Shape& batch_shape, std::uint64_t seed) {
  Rng rng(seed);
  auto layer = wvdnet::make_layer<double>(spec);
  for (auto& p : layer->params()) {
    for (auto& v : p.value->values()) v = rng.uniform(-0.5, 0.5);
  }
  Tensor<double> x = random_tensor(batch_shape, rng, 0.05);
  const std::uint64_t mask_seed = rng.next();
  auto run = [&]() {
    Rng r(mask_seed);
    return layer->forward(x, true, r, wvdnet::kernels::Backend::serial);
  };
  const Tensor<double> y = run();
  const Tensor<double> R = random_tensor(y.shape(), rng);
  for (auto& p : layer->params()) p.grad->fill(0.0);
  run();
  const Tensor<double> gx = layer->backward(R, true, wvdnet::kernels::Backend::serial);

  Result res;
  auto loss = [&]() { return dot(run(), R); };
  std::vector<double> xv(x.values().begin(), x.values().end());
  std::vector<double> num = oracle::numeric_gradient(xv, [&]() {
    std::copy(xv.begin(), xv.end(), x.values().begin());
    return loss();
  });
  std::copy(xv.begin(), xv.end(), x.values().begin());
  res.input_error = oracle::max_rel_error(std::vector<double>(gx.values().begin(), gx.values().end()), num);

  for (auto& p : layer->params()) {
    const std::vector<double> analytic(p.grad->values().begin(), p.grad->values().end());
    std::vector<double> pv(p.value->values().begin(), p.value->values().end());
    const auto pn = oracle::numeric_gradient(pv, [&]() {
      std::copy(pv.begin(), pv.end(), p.value->values().begin());
      return loss();
    });
    std::copy(pv.begin(), pv.end(), p.value->values().begin());
    res.param_error = std::max(res.param_error, oracle::max_rel_error(analytic, pn));
  }
  return res;
}

// Cross-entropy through a whole network, every parameter checked.
inline Result check_network(const wvdnet::NetworkConfig& cfg, std::size_t batch, std::uint64_t seed) {
  wvdnet::Network<double> net(cfg);
  net.set_backend(wvdnet::kernels::Backend::serial);
  Rng rng(seed);
  for (auto& p : net.params()) {
    for (auto& v : p.value->values()) v = rng.uniform(-0.5, 0.5);
  }
  Tensor<double> x = random_tensor({batch, cfg.input_shape[0], cfg.input_shape[1], cfg.input_shape[2]}, rng);
  std::vector<std::size_t> labels(batch);
  for (auto& l : labels) l = rng.below(cfg.num_classes);
  const std::uint64_t mask_seed = rng.next();

  auto loss = [&]() {
    Rng r(mask_seed);
    const Tensor<double> z = net.forward(x, true, r);
    double total = 0;
    for (std::size_t i = 0; i < batch; ++i) {
      total += wvdnet::softmax_cross_entropy<double>(
                   std::span<const double>(z.data() + i * cfg.num_classes, cfg.num_classes), labels[i])
                   .loss;
    }
    return total / static_cast<double>(batch);
  };
  net.zero_grad();
  Rng r(mask_seed);
  const Tensor<double> z = net.forward(x, true, r);
  Tensor<double> g(z.shape());
  for (std::size_t i = 0; i < batch; ++i) {
    const auto ce = wvdnet::softmax_cross_entropy<double>(
        std::span<const double>(z.data() + i * cfg.num_classes, cfg.num_classes), labels[i]);
    for (std::size_t c = 0; c < cfg.num_classes; ++c) g[i * cfg.num_classes + c] = ce.grad_logits[c] / batch;
  }
  const Tensor<double> gx = net.backward(g, true);

  Result res;
  std::vector<double> xv(x.values().begin(), x.values().end());
  const auto num = oracle::numeric_gradient(xv, [&]() {
    std::copy(xv.begin(), xv.end(), x.values().begin());
    return loss();
  });
  std::copy(xv.begin(), xv.end(), x.values().begin());
  res.input_error = oracle::max_rel_error(std::vector<double>(gx.values().begin(), gx.values().end()), num);
  for (auto& p : net.params()) {
    const std::vector<double> analytic(p.grad->values().begin(), p.grad->values().end());
    std::vector<double> pv(p.value->values().begin(), p.value->values().end());
    const auto pn = oracle::numeric_gradient(pv, [&]() {
      std::copy(pv.begin(), pv.end(), p.value->values().begin());
      return loss();
    });
    std::copy(pv.begin(), pv.end(), p.value->values().begin());
    res.param_error = std::max(res.param_error, oracle::max_rel_error(analytic, pn));
  }
  return res;
}

// The layer kinds and small shapes the checks sweep over.
struct Case {
  const char* name;
  LayerSpec spec;
  Shape batch_shape;
};

inline std::vector<Case> layer_cases() {
  return {
      {"conv2d 3x3 s1 p1", LayerSpec::conv2d(2, 3, 3, 1, 1), {2, 2, 6, 7}},
      {"conv2d 3x3 s1 p0", LayerSpec::conv2d(3, 2, 3, 1, 0), {1, 3, 5, 5}},
      {"conv2d 2x2 s2 p0", LayerSpec::conv2d(2, 2, 2, 2, 0), {2, 2, 6, 6}},
      {"conv2d 3x3 s1 p2", LayerSpec::conv2d(1, 2, 3, 1, 2), {1, 1, 4, 4}},
      {"conv2d 3x3 4ch 8x8", LayerSpec::conv2d(4, 4, 3, 1, 1), {1, 4, 8, 8}},
      {"maxpool2d 2/2", LayerSpec::maxpool2d(2, 2), {2, 3, 6, 7}},
      {"relu", LayerSpec::relu(), {2, 3, 4, 4}},
      {"dropout 0.25", LayerSpec::dropout(0.25), {2, 40}},
      {"flatten", LayerSpec::flatten(), {2, 3, 4, 4}},
      {"linear", LayerSpec::linear(12, 5), {3, 12}},
  };
}

inline wvdnet::NetworkConfig tiny_reference(std::size_t classes = 3) {
  wvdnet::ReferenceOptions o;
  o.rows = 8;
  o.cols = 8;
  o.num_classes = classes;
  o.conv_channels = {2, 3};
  o.hidden_units = 6;
  o.dropout = 0.25;
  o.seed = 1;
  return wvdnet::reference_config(o);
}

}  // namespace gradcheck
