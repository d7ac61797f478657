#include "wvdnet/stream.hpp"

#include <cmath>
#include <cstdio>

#include "wvdnet/csv.hpp"
#include "wvdnet/error.hpp"

namespace wvdnet {

std::size_t stream_window_count(std::size_t length, std::size_t window, std::size_t stride) {
  if (window == 0 || stride == 0) throw InvalidArgument("stream: window and stride must be positive");
  if (length < window) return 0;
  return (length - window) / stride + 1;
}

std::vector<StreamPrediction> stream_infer(Network<float>& net, const Signal& signal, const PipelineConfig& cfg,
                                           double window_s, double stride_s) {
  if (!(window_s > 0) || !(stride_s > 0)) throw InvalidArgument("stream: window and stride must be positive");
  const auto& in = net.config().input_shape;
  if (in[0] != 1 || in[1] != cfg.image_rows || in[2] != cfg.image_cols) {
    throw InvalidArgument("stream: network input does not match the configured image size");
  }
  const double fs = signal.sample_rate_hz;
  const auto window = static_cast<std::size_t>(std::llround(window_s * fs));
  const auto stride = static_cast<std::size_t>(std::llround(stride_s * fs));
  if (stride == 0) throw InvalidArgument("stream: stride shorter than one sample");
  const std::size_t count = stream_window_count(signal.size(), window, stride);
  if (count == 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "stream: signal is %.3f s, shorter than one %.3f s window", signal.duration_s(),
                  window_s);
    throw InvalidArgument(buf);
  }

  std::vector<TFDImage> images(count);
  std::vector<std::string> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      const auto first = signal.samples.begin() + static_cast<std::ptrdiff_t>(i * stride);
      const Signal piece(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(window)), fs);
      images[i] = clip_to_image({piece}, cfg, kernels::Backend::serial);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw DataError("stream: " + e);
  }

  std::vector<StreamPrediction> out;
  for (std::size_t i = 0; i < count; ++i) {
    Tensor<float> x({1, cfg.image_rows, cfg.image_cols});
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = static_cast<float>(images[i].values[j]);
    const Prediction p = predict(net, x);
    StreamPrediction s;
    s.window_start_s = static_cast<double>(i * stride) / fs;
    s.window_end_s = static_cast<double>(i * stride + window) / fs;
    s.class_index = p.class_index;
    s.probabilities = p.probabilities;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<StreamPrediction> majority_smooth(const std::vector<StreamPrediction>& preds, std::size_t k) {
  if (k == 0 || k % 2 == 0) throw InvalidArgument("majority_smooth: k must be odd");
  std::vector<StreamPrediction> out = preds;
  const std::size_t half = k / 2;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(preds.size(), i + half + 1);
    std::vector<std::size_t> votes;
    for (std::size_t j = lo; j < hi; ++j) {
      const std::size_t c = preds[j].class_index;
      if (votes.size() <= c) votes.resize(c + 1, 0);
      ++votes[c];
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
      if (votes[c] > votes[best]) best = c;
    }
    out[i].class_index = best;
  }
  return out;
}

std::string stream_csv(const std::vector<StreamPrediction>& preds, const std::vector<std::string>& class_names) {
  std::string out = "start_s,end_s,pred_class,pred_name";
  for (std::size_t c = 0; c < class_names.size(); ++c) out += ",p" + std::to_string(c);
  out += "\n";
  char buf[64];
  for (const auto& p : preds) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,", p.window_start_s, p.window_end_s, p.class_index);
    out += buf;
    out += csv_escape(p.class_index < class_names.size() ? class_names[p.class_index] : std::to_string(p.class_index));
    for (double v : p.probabilities) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace wvdnet
