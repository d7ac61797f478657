#pragma once

#include <string>
#include <vector>

#include "wvdnet/network.hpp"
#include "wvdnet/pipeline.hpp"

namespace wvdnet {

struct StreamPrediction {
  double window_start_s = 0.0;
  double window_end_s = 0.0;
  std::size_t class_index = 0;
  std::vector<double> probabilities;
};

// floor((length - window) / stride) + 1, all in samples; 0 when length < window.
std::size_t stream_window_count(std::size_t length, std::size_t window, std::size_t stride);

// Slides a window over the source-rate signal; each window goes through the
// full clip pipeline and one eval-mode forward pass. Ordered by start time.
std::vector<StreamPrediction> stream_infer(Network<float>& net, const Signal& signal, const PipelineConfig& cfg,
                                           double window_s = 4.0, double stride_s = 1.0);

// Majority vote over a centered run of k windows (k odd), truncated at the
// ends; ties go to the lowest class. Probabilities are left untouched.
std::vector<StreamPrediction> majority_smooth(const std::vector<StreamPrediction>& preds, std::size_t k);

// start_s,end_s,pred_class,pred_name,p0..p{k-1}
std::string stream_csv(const std::vector<StreamPrediction>& preds, const std::vector<std::string>& class_names);

}  // namespace wvdnet
