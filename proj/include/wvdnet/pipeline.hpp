#pragma once

#include <string>
#include <vector>

#include "wvdnet/kernels.hpp"
#include "wvdnet/signal.hpp"
#include "wvdnet/tfd.hpp"

namespace wvdnet {

struct PipelineConfig {
  double target_rate_hz = 4000.0;
  double clip_seconds = 4.0;
  std::size_t image_rows = 300;
  std::size_t image_cols = 300;
  std::size_t lag_window_len = 0;  // 0: default_lag_window_length of the clip
  std::size_t n_freq_bins = kDefaultFreqBins;
  std::size_t max_time_rows = 1200;
  bool log_compress = false;

  void validate() const;
  // Stable text form, used for hashing.
  std::string canonical() const;
};

// Average channels, decimate to the largest integer divisor rate >= target
// (skipped when the source is already at or below the target), then
// center-crop or zero-pad to clip_seconds at that rate.
Signal prepare_signal(const std::vector<Signal>& channels, const PipelineConfig& cfg);

// analytic signal -> pseudo-WVD -> bilinear resize -> [0, 1] normalize.
TFDImage signal_to_image(const Signal& working, const PipelineConfig& cfg,
                         kernels::Backend backend = kernels::Backend::omp);

TFDImage clip_to_image(const std::vector<Signal>& channels, const PipelineConfig& cfg,
                       kernels::Backend backend = kernels::Backend::omp);

}  // namespace wvdnet
