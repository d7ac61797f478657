#include "wvdnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wvdnet/error.hpp"

namespace wvdnet {

namespace {

kernels::ConvGeometry conv_geometry(const Shape& in, const Shape& w, std::size_t stride, std::size_t padding) {
  if (in.size() != 3) throw InvalidArgument("conv2d: input must be [C,H,W], got " + shape_string(in));
  if (w.size() != 4) throw InvalidArgument("conv2d: weights must be [Co,Ci,kh,kw], got " + shape_string(w));
  if (w[1] != in[0]) {
    throw InvalidArgument("conv2d: weights expect " + std::to_string(w[1]) + " input channels, input has " +
                          std::to_string(in[0]));
  }
  if (stride == 0) throw InvalidArgument("conv2d: stride must be positive");
  if (in[1] + 2 * padding < w[2] || in[2] + 2 * padding < w[3]) {
    throw InvalidArgument("conv2d: kernel larger than padded input");
  }
  if ((in[1] + 2 * padding - w[2]) % stride != 0 || (in[2] + 2 * padding - w[3]) % stride != 0) {
    // Floor semantics would silently ignore trailing pixels; keep shapes exact.
    throw InvalidArgument("conv2d: (H + 2p - k) must be divisible by the stride");
  }
  return kernels::ConvGeometry{in[0], in[1], in[2], w[0], w[2], w[3], stride, padding};
}

}  // namespace

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const Tensor<T>& weights, const Tensor<T>& bias,
                         std::size_t stride, std::size_t padding, kernels::Backend backend) {
  const auto g = conv_geometry(input.shape(), weights.shape(), stride, padding);
  if (bias.shape() != Shape{g.out_ch}) throw InvalidArgument("conv2d: bias must be [Co]");
  Tensor<T> out({g.out_ch, g.out_h(), g.out_w()});
  kernels::conv2d_forward(g, input.data(), weights.data(), bias.data(), out.data(), backend);
  return out;
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& grad_out, const Tensor<T>& input, const Tensor<T>& weights,
                             std::size_t stride, std::size_t padding, kernels::Backend backend) {
  const auto g = conv_geometry(input.shape(), weights.shape(), stride, padding);
  if (grad_out.shape() != Shape{g.out_ch, g.out_h(), g.out_w()}) {
    throw InvalidArgument("conv2d_backward: grad_out shape " + shape_string(grad_out.shape()) +
                          " does not match forward output");
  }
  ConvGrads<T> grads{Tensor<T>(input.shape()), Tensor<T>(weights.shape()), Tensor<T>({g.out_ch})};
  kernels::conv2d_backward_input(g, grad_out.data(), weights.data(), grads.grad_input.data(), backend);
  kernels::conv2d_backward_params(g, grad_out.data(), input.data(), grads.grad_weights.data(),
                                  grads.grad_bias.data(), backend);
  return grads;
}

namespace {

template <typename T>
void maxpool_plane_set(const T* in, std::size_t channels, std::size_t h, std::size_t w, std::size_t kernel,
                       std::size_t stride, T* out, std::uint32_t* argmax) {
  const std::size_t oh = (h - kernel) / stride + 1;
  const std::size_t ow = (w - kernel) / stride + 1;
  for (std::size_t c = 0; c < channels; ++c) {
    const T* plane = in + c * h * w;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = (y * stride) * w + x * stride;
        T best_v = plane[best];
        for (std::size_t ky = 0; ky < kernel; ++ky) {
          for (std::size_t kx = 0; kx < kernel; ++kx) {
            const std::size_t idx = (y * stride + ky) * w + x * stride + kx;
            if (plane[idx] > best_v) {
              best_v = plane[idx];
              best = idx;
            }
          }
        }
        const std::size_t o = (c * oh + y) * ow + x;
        out[o] = best_v;
        argmax[o] = static_cast<std::uint32_t>(c * h * w + best);
      }
    }
  }
}

Shape pool_output(const Shape& in, std::size_t kernel, std::size_t stride) {
  if (in.size() != 3) throw InvalidArgument("maxpool2d: input must be [C,H,W], got " + shape_string(in));
  if (kernel == 0 || stride == 0) throw InvalidArgument("maxpool2d: kernel and stride must be positive");
  if (in[1] < kernel || in[2] < kernel) throw InvalidArgument("maxpool2d: input smaller than the pooling window");
  return {in[0], (in[1] - kernel) / stride + 1, (in[2] - kernel) / stride + 1};
}

}  // namespace

template <typename T>
PoolResult<T> maxpool2d_forward(const Tensor<T>& input, std::size_t kernel, std::size_t stride) {
  const Shape out_shape = pool_output(input.shape(), kernel, stride);
  PoolResult<T> r{Tensor<T>(out_shape), std::vector<std::uint32_t>(shape_size(out_shape))};
  maxpool_plane_set(input.data(), input.dim(0), input.dim(1), input.dim(2), kernel, stride, r.output.data(),
                    r.argmax.data());
  return r;
}

template <typename T>
Tensor<T> maxpool2d_backward(const Tensor<T>& grad_out, const std::vector<std::uint32_t>& argmax,
                             const Shape& input_shape) {
  if (grad_out.size() != argmax.size()) throw InvalidArgument("maxpool2d_backward: argmax/grad size mismatch");
  Tensor<T> grad_in(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) {
    if (argmax[i] >= grad_in.size()) throw InvalidArgument("maxpool2d_backward: argmax index out of range");
    grad_in[argmax[i]] += grad_out[i];
  }
  return grad_in;
}

namespace {

struct LinearDims {
  std::size_t batch, in_f, out_f;
};

LinearDims linear_dims(const Shape& x, const Shape& w) {
  if (w.size() != 2) throw InvalidArgument("linear: weights must be [out,in]");
  std::size_t batch = 1;
  std::size_t in_f = 0;
  if (x.size() == 1) {
    in_f = x[0];
  } else if (x.size() == 2) {
    batch = x[0];
    in_f = x[1];
  } else {
    throw InvalidArgument("linear: input must be [in] or [N,in], got " + shape_string(x));
  }
  if (in_f != w[1]) {
    throw InvalidArgument("linear: input has " + std::to_string(in_f) + " features, weights expect " +
                          std::to_string(w[1]));
  }
  return {batch, in_f, w[0]};
}

}  // namespace

template <typename T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& weights, const Tensor<T>& bias,
                         kernels::Backend backend) {
  const auto d = linear_dims(x.shape(), weights.shape());
  if (bias.shape() != Shape{d.out_f}) throw InvalidArgument("linear: bias must be [out]");
  Tensor<T> y(x.rank() == 1 ? Shape{d.out_f} : Shape{d.batch, d.out_f});
  kernels::linear_forward(d.batch, d.in_f, d.out_f, x.data(), weights.data(), bias.data(), y.data(), backend);
  return y;
}

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& grad_out, const Tensor<T>& x, const Tensor<T>& weights,
                               kernels::Backend backend) {
  const auto d = linear_dims(x.shape(), weights.shape());
  if (grad_out.size() != d.batch * d.out_f) throw InvalidArgument("linear_backward: grad_out shape mismatch");
  LinearGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(weights.shape()), Tensor<T>({d.out_f})};
  kernels::linear_backward_input(d.batch, d.in_f, d.out_f, grad_out.data(), weights.data(), g.grad_input.data(),
                                 backend);
  kernels::linear_backward_params(d.batch, d.in_f, d.out_f, grad_out.data(), x.data(), g.grad_weights.data(),
                                  g.grad_bias.data(), backend);
  return g;
}

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.values()) v = v > T{} ? v : T{};
  return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad_out, const Tensor<T>& input) {
  if (grad_out.size() != input.size()) throw InvalidArgument("relu_backward: shape mismatch");
  Tensor<T> g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(input[i] > T{})) g[i] = T{};
  }
  return g;
}

template <typename T>
DropoutResult<T> dropout_forward(const Tensor<T>& x, double p, bool train, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("dropout: p must be in [0, 1)");
  if (!train || p == 0.0) return {x, Tensor<T>(x.shape(), T{1})};
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  DropoutResult<T> r{Tensor<T>(x.shape()), Tensor<T>(x.shape())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T m = rng.uniform() < p ? T{} : scale;
    r.mask[i] = m;
    r.output[i] = x[i] * m;
  }
  return r;
}

template <typename T>
Tensor<T> dropout_backward(const Tensor<T>& grad_out, const Tensor<T>& mask) {
  if (grad_out.size() != mask.size()) throw InvalidArgument("dropout_backward: shape mismatch");
  Tensor<T> g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= mask[i];
  return g;
}

template <typename T>
Tensor<T> flatten(const Tensor<T>& x) {
  if (x.rank() < 1) throw InvalidArgument("flatten: empty shape");
  const std::size_t n = x.dim(0);
  return x.reshaped({n, n == 0 ? 0 : x.size() / n});
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (auto& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

template <typename T>
LossResult softmax_cross_entropy(std::span<const T> logits, std::size_t label) {
  if (logits.empty()) throw InvalidArgument("softmax_cross_entropy: no logits");
  if (label >= logits.size()) {
    throw InvalidArgument("softmax_cross_entropy: label " + std::to_string(label) + " out of range for " +
                          std::to_string(logits.size()) + " classes");
  }
  std::vector<double> z(logits.begin(), logits.end());
  for (double v : z) {
    if (!std::isfinite(v)) throw InvalidArgument("softmax_cross_entropy: non-finite logit");
  }
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - mx);
  const double log_sum = mx + std::log(sum);
  LossResult r;
  r.loss = log_sum - z[label];
  r.grad_logits.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) r.grad_logits[i] = std::exp(z[i] - log_sum);
  r.grad_logits[label] -= 1.0;
  return r;
}

// ---- specs ----------------------------------------------------------------------

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool2d: return "maxpool2d";
    case LayerKind::relu: return "relu";
    case LayerKind::dropout: return "dropout";
    case LayerKind::flatten: return "flatten";
    case LayerKind::linear: return "linear";
  }
  return "unknown";
}

LayerSpec LayerSpec::conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride,
                            std::size_t padding) {
  LayerSpec s;
  s.kind = LayerKind::conv2d;
  s.in_channels = in_ch;
  s.out_channels = out_ch;
  s.kernel = kernel;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::maxpool2d(std::size_t kernel, std::size_t stride) {
  LayerSpec s;
  s.kind = LayerKind::maxpool2d;
  s.kernel = kernel;
  s.stride = stride;
  return s;
}

LayerSpec LayerSpec::relu() {
  LayerSpec s;
  s.kind = LayerKind::relu;
  return s;
}

LayerSpec LayerSpec::dropout(double p) {
  LayerSpec s;
  s.kind = LayerKind::dropout;
  s.p = p;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::flatten;
  return s;
}

LayerSpec LayerSpec::linear(std::size_t in, std::size_t out) {
  LayerSpec s;
  s.kind = LayerKind::linear;
  s.in_features = in;
  s.out_features = out;
  return s;
}

std::string describe(const LayerSpec& s) {
  std::ostringstream o;
  switch (s.kind) {
    case LayerKind::conv2d:
      o << "Conv2d(" << s.in_channels << ", " << s.out_channels << ", kernel_size=(" << s.kernel << ", " << s.kernel
        << "), stride=(" << s.stride << ", " << s.stride << "), padding=(" << s.padding << ", " << s.padding << "))";
      break;
    case LayerKind::maxpool2d:
      o << "MaxPool2d(kernel_size=" << s.kernel << ", stride=" << s.stride
        << ", padding=0, dilation=1, ceil_mode=False)";
      break;
    case LayerKind::relu: o << "ReLU()"; break;
    case LayerKind::dropout: o << "Dropout(p=" << s.p << ", inplace=False)"; break;
    case LayerKind::flatten: o << "Flatten()"; break;
    case LayerKind::linear:
      o << "Linear(in_features=" << s.in_features << ", out_features=" << s.out_features << ", bias=True)";
      break;
  }
  return o.str();
}

Shape layer_output_shape(const LayerSpec& s, const Shape& in) {
  switch (s.kind) {
    case LayerKind::conv2d: {
      if (in.size() != 3 || in[0] != s.in_channels) {
        throw InvalidArgument(describe(s) + " cannot take input " + shape_string(in));
      }
      if (s.kernel == 0 || s.stride == 0) throw InvalidArgument(describe(s) + ": kernel and stride must be positive");
      if (in[1] + 2 * s.padding < s.kernel || in[2] + 2 * s.padding < s.kernel) {
        throw InvalidArgument(describe(s) + ": kernel larger than padded input " + shape_string(in));
      }
      if ((in[1] + 2 * s.padding - s.kernel) % s.stride || (in[2] + 2 * s.padding - s.kernel) % s.stride) {
        throw InvalidArgument(describe(s) + ": stride does not tile input " + shape_string(in));
      }
      return {s.out_channels, (in[1] + 2 * s.padding - s.kernel) / s.stride + 1,
              (in[2] + 2 * s.padding - s.kernel) / s.stride + 1};
    }
    case LayerKind::maxpool2d: return pool_output(in, s.kernel, s.stride);
    case LayerKind::relu: return in;
    case LayerKind::dropout:
      if (!(s.p >= 0.0 && s.p < 1.0)) throw InvalidArgument("dropout p must be in [0, 1)");
      return in;
    case LayerKind::flatten: return {shape_size(in)};
    case LayerKind::linear:
      if (in.size() != 1 || in[0] != s.in_features) {
        throw InvalidArgument(describe(s) + " cannot take input " + shape_string(in));
      }
      return {s.out_features};
  }
  throw InvalidArgument("unknown layer kind");
}

// ---- batched layers ----------------------------------------------------------------

namespace {

Shape sample_shape(const Shape& batch_shape) { return Shape(batch_shape.begin() + 1, batch_shape.end()); }

Shape with_batch(std::size_t n, const Shape& s) {
  Shape out{n};
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

template <typename T>
class ConvLayer final : public Layer<T> {
 public:
  explicit ConvLayer(const LayerSpec& s)
      : spec_(s),
        weight_({s.out_channels, s.in_channels, s.kernel, s.kernel}),
        bias_({s.out_channels}),
        grad_weight_(weight_.shape()),
        grad_bias_(bias_.shape()) {}

  Tensor<T> forward(const Tensor<T>& x, bool, Rng&, kernels::Backend backend) override {
    if (x.rank() != 4) throw InvalidArgument("conv2d layer: input must be [N,C,H,W]");
    geom_ = conv_geometry(sample_shape(x.shape()), weight_.shape(), spec_.stride, spec_.padding);
    input_ = x;
    const std::size_t n = x.dim(0);
    const std::size_t in_sz = geom_.in_ch * geom_.in_h * geom_.in_w;
    const std::size_t out_sz = geom_.out_ch * geom_.out_h() * geom_.out_w();
    Tensor<T> out({n, geom_.out_ch, geom_.out_h(), geom_.out_w()});
    for (std::size_t i = 0; i < n; ++i) {
      kernels::conv2d_forward(geom_, x.data() + i * in_sz, weight_.data(), bias_.data(), out.data() + i * out_sz,
                              backend);
    }
    return out;
  }

  Tensor<T> backward(const Tensor<T>& grad_out, bool need_input_grad, kernels::Backend backend) override {
    const std::size_t n = input_.dim(0);
    const std::size_t in_sz = geom_.in_ch * geom_.in_h * geom_.in_w;
    const std::size_t out_sz = geom_.out_ch * geom_.out_h() * geom_.out_w();
    if (grad_out.size() != n * out_sz) throw InvalidArgument("conv2d layer: grad shape mismatch");
    Tensor<T> grad_in;
    if (need_input_grad) grad_in = Tensor<T>(input_.shape());
    for (std::size_t i = 0; i < n; ++i) {
      kernels::conv2d_backward_params(geom_, grad_out.data() + i * out_sz, input_.data() + i * in_sz,
                                      grad_weight_.data(), grad_bias_.data(), backend);
      if (need_input_grad) {
        kernels::conv2d_backward_input(geom_, grad_out.data() + i * out_sz, weight_.data(),
                                       grad_in.data() + i * in_sz, backend);
      }
    }
    return grad_in;
  }

  std::vector<Param<T>> params() override {
    return {{"weight", &weight_, &grad_weight_}, {"bias", &bias_, &grad_bias_}};
  }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ConvLayer>(*this); }
  void clear_cache() override { input_ = {}; }
  const LayerSpec& spec() const override { return spec_; }

 private:
  LayerSpec spec_;
  Tensor<T> weight_, bias_, grad_weight_, grad_bias_;
  Tensor<T> input_;
  kernels::ConvGeometry geom_{};
};

template <typename T>
class PoolLayer final : public Layer<T> {
 public:
  explicit PoolLayer(const LayerSpec& s) : spec_(s) {}

  Tensor<T> forward(const Tensor<T>& x, bool, Rng&, kernels::Backend) override {
    if (x.rank() != 4) throw InvalidArgument("maxpool2d layer: input must be [N,C,H,W]");
    in_shape_ = x.shape();
    const Shape per = sample_shape(x.shape());
    const Shape out_per = pool_output(per, spec_.kernel, spec_.stride);
    const std::size_t n = x.dim(0);
    const std::size_t in_sz = shape_size(per), out_sz = shape_size(out_per);
    Tensor<T> out(with_batch(n, out_per));
    argmax_.assign(n * out_sz, 0);
    for (std::size_t i = 0; i < n; ++i) {
      maxpool_plane_set(x.data() + i * in_sz, per[0], per[1], per[2], spec_.kernel, spec_.stride,
                        out.data() + i * out_sz, argmax_.data() + i * out_sz);
    }
    return out;
  }

  Tensor<T> backward(const Tensor<T>& grad_out, bool need_input_grad, kernels::Backend) override {
    if (!need_input_grad) return {};
    if (grad_out.size() != argmax_.size()) throw InvalidArgument("maxpool2d layer: grad shape mismatch");
    Tensor<T> grad_in(in_shape_);
    const std::size_t n = in_shape_[0];
    const std::size_t in_sz = grad_in.size() / n, out_sz = argmax_.size() / n;
    for (std::size_t i = 0; i < n; ++i) {
      T* gi = grad_in.data() + i * in_sz;
      for (std::size_t j = 0; j < out_sz; ++j) gi[argmax_[i * out_sz + j]] += grad_out[i * out_sz + j];
    }
    return grad_in;
  }

  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<PoolLayer>(*this); }
  void clear_cache() override { argmax_.clear(); }
  const LayerSpec& spec() const override { return spec_; }

 private:
  LayerSpec spec_;
  Shape in_shape_;
  std::vector<std::uint32_t> argmax_;
};

template <typename T>
class ReluLayer final : public Layer<T> {
 public:
  explicit ReluLayer(const LayerSpec& s) : spec_(s) {}

  Tensor<T> forward(const Tensor<T>& x, bool, Rng&, kernels::Backend) override {
    input_ = x;
    return relu_forward(x);
  }
  Tensor<T> backward(const Tensor<T>& grad_out, bool need_input_grad, kernels::Backend) override {
    if (!need_input_grad) return {};
    return relu_backward(grad_out, input_);
  }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ReluLayer>(*this); }
  void clear_cache() override { input_ = {}; }
  const LayerSpec& spec() const override { return spec_; }

 private:
  LayerSpec spec_;
  Tensor<T> input_;
};

template <typename T>
class DropoutLayer final : public Layer<T> {
 public:
  explicit DropoutLayer(const LayerSpec& s) : spec_(s) {}

  Tensor<T> forward(const Tensor<T>& x, bool train, Rng& rng, kernels::Backend) override {
    auto r = dropout_forward(x, spec_.p, train, rng);
    mask_ = std::move(r.mask);
    return std::move(r.output);
  }
  Tensor<T> backward(const Tensor<T>& grad_out, bool need_input_grad, kernels::Backend) override {
    if (!need_input_grad) return {};
    return dropout_backward(grad_out, mask_);
  }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<DropoutLayer>(*this); }
  void clear_cache() override { mask_ = {}; }
  const LayerSpec& spec() const override { return spec_; }

 private:
  LayerSpec spec_;
  Tensor<T> mask_;
};

template <typename T>
class FlattenLayer final : public Layer<T> {
 public:
  explicit FlattenLayer(const LayerSpec& s) : spec_(s) {}

  Tensor<T> forward(const Tensor<T>& x, bool, Rng&, kernels::Backend) override {
    in_shape_ = x.shape();
    return flatten(x);
  }
  Tensor<T> backward(const Tensor<T>& grad_out, bool need_input_grad, kernels::Backend) override {
    if (!need_input_grad) return {};
    return grad_out.reshaped(in_shape_);
  }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<FlattenLayer>(*this); }
  const LayerSpec& spec() const override { return spec_; }

 private:
  LayerSpec spec_;
  Shape in_shape_;
};

template <typename T>
class LinearLayer final : public Layer<T> {
 public:
  explicit LinearLayer(const LayerSpec& s)
      : spec_(s),
        weight_({s.out_features, s.in_features}),
        bias_({s.out_features}),
        grad_weight_(weight_.shape()),
        grad_bias_(bias_.shape()) {}

  Tensor<T> forward(const Tensor<T>& x, bool, Rng&, kernels::Backend backend) override {
    if (x.rank() != 2) throw InvalidArgument("linear layer: input must be [N,in]");
    input_ = x;
    return linear_forward(x, weight_, bias_, backend);
  }

  Tensor<T> backward(const Tensor<T>& grad_out, bool need_input_grad, kernels::Backend backend) override {
    const std::size_t n = input_.dim(0);
    if (grad_out.size() != n * spec_.out_features) throw InvalidArgument("linear layer: grad shape mismatch");
    kernels::linear_backward_params(n, spec_.in_features, spec_.out_features, grad_out.data(), input_.data(),
                                    grad_weight_.data(), grad_bias_.data(), backend);
    if (!need_input_grad) return {};
    Tensor<T> grad_in(input_.shape());
    kernels::linear_backward_input(n, spec_.in_features, spec_.out_features, grad_out.data(), weight_.data(),
                                   grad_in.data(), backend);
    return grad_in;
  }

  std::vector<Param<T>> params() override {
    return {{"weight", &weight_, &grad_weight_}, {"bias", &bias_, &grad_bias_}};
  }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<LinearLayer>(*this); }
  void clear_cache() override { input_ = {}; }
  const LayerSpec& spec() const override { return spec_; }

 private:
  LayerSpec spec_;
  Tensor<T> weight_, bias_, grad_weight_, grad_bias_;
  Tensor<T> input_;
};

}  // namespace

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::conv2d: return std::make_unique<ConvLayer<T>>(spec);
    case LayerKind::maxpool2d: return std::make_unique<PoolLayer<T>>(spec);
    case LayerKind::relu: return std::make_unique<ReluLayer<T>>(spec);
    case LayerKind::dropout: return std::make_unique<DropoutLayer<T>>(spec);
    case LayerKind::flatten: return std::make_unique<FlattenLayer<T>>(spec);
    case LayerKind::linear: return std::make_unique<LinearLayer<T>>(spec);
  }
  throw InvalidArgument("unknown layer kind");
}

#define WVDNET_INSTANTIATE(T)                                                                                    \
  template Tensor<T> conv2d_forward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,        \
                                       std::size_t, kernels::Backend);                                           \
  template ConvGrads<T> conv2d_backward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,    \
                                           std::size_t, kernels::Backend);                                       \
  template PoolResult<T> maxpool2d_forward<T>(const Tensor<T>&, std::size_t, std::size_t);                       \
  template Tensor<T> maxpool2d_backward<T>(const Tensor<T>&, const std::vector<std::uint32_t>&, const Shape&);   \
  template Tensor<T> linear_forward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, kernels::Backend);  \
  template LinearGrads<T> linear_backward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,               \
                                             kernels::Backend);                                                  \
  template Tensor<T> relu_forward<T>(const Tensor<T>&);                                                          \
  template Tensor<T> relu_backward<T>(const Tensor<T>&, const Tensor<T>&);                                       \
  template DropoutResult<T> dropout_forward<T>(const Tensor<T>&, double, bool, Rng&);                            \
  template Tensor<T> dropout_backward<T>(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> flatten<T>(const Tensor<T>&);                                                               \
  template LossResult softmax_cross_entropy<T>(std::span<const T>, std::size_t);                                 \
  template std::unique_ptr<Layer<T>> make_layer<T>(const LayerSpec&);

WVDNET_INSTANTIATE(float)
WVDNET_INSTANTIATE(double)

#undef WVDNET_INSTANTIATE

}  // namespace wvdnet
