#include "wvdnet/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "wvdnet/analytic.hpp"
#include "wvdnet/error.hpp"

namespace wvdnet {

void PipelineConfig::validate() const {
  if (!(target_rate_hz > 0)) throw InvalidArgument("pipeline: target_rate_hz must be positive");
  if (!(clip_seconds > 0)) throw InvalidArgument("pipeline: clip_seconds must be positive");
  if (image_rows == 0 || image_cols == 0) throw InvalidArgument("pipeline: image size must be positive");
  if (n_freq_bins < 2) throw InvalidArgument("pipeline: n_freq_bins must be at least 2");
  if (max_time_rows == 0) throw InvalidArgument("pipeline: max_time_rows must be positive");
  if (lag_window_len != 0 && lag_window_len % 2 == 0) throw InvalidArgument("pipeline: lag_window_len must be odd");
}

std::string PipelineConfig::canonical() const {
  std::ostringstream o;
  o.precision(17);
  o << "target_rate_hz=" << target_rate_hz << ";clip_seconds=" << clip_seconds << ";image_rows=" << image_rows
    << ";image_cols=" << image_cols << ";lag_window_len=" << lag_window_len << ";n_freq_bins=" << n_freq_bins
    << ";max_time_rows=" << max_time_rows << ";log_compress=" << log_compress;
  return o.str();
}

Signal prepare_signal(const std::vector<Signal>& channels, const PipelineConfig& cfg) {
  cfg.validate();
  Signal s = average_channels(channels);
  if (s.sample_rate_hz > cfg.target_rate_hz) s = decimate(s, cfg.target_rate_hz, RatePolicy::largest_divisor);
  const auto len = static_cast<std::size_t>(std::llround(cfg.clip_seconds * s.sample_rate_hz));
  return pad_or_truncate(s, len);
}

TFDImage signal_to_image(const Signal& working, const PipelineConfig& cfg, kernels::Backend backend) {
  cfg.validate();
  const ComplexSignal z = analytic_signal(working);
  const std::size_t wlen = cfg.lag_window_len ? cfg.lag_window_len : default_lag_window_length(z.size());
  const TFDImage raw =
      pseudo_wvd(z, hamming_lag_window(wlen), default_time_stride(z.size(), cfg.max_time_rows), cfg.n_freq_bins, backend);
  return normalize_image(resize_bilinear(raw, cfg.image_rows, cfg.image_cols), cfg.log_compress);
}

TFDImage clip_to_image(const std::vector<Signal>& channels, const PipelineConfig& cfg, kernels::Backend backend) {
  return signal_to_image(prepare_signal(channels, cfg), cfg, backend);
}

}  // namespace wvdnet
