#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wvdnet/network.hpp"
#include "wvdnet/train.hpp"

namespace wvdnet {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // Set when the denominator was zero and the value was defined as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct EvalReport {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  ClassMetrics macro_avg;
  ClassMetrics weighted_avg;
  std::size_t total = 0;
};

EvalReport build_report(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& predicted,
                        const std::vector<std::string>& class_names);

// Rejects an empty set or a class count that differs from the network's.
EvalReport evaluate(Network<float>& net, const ImageSet& test_set, const std::vector<std::string>& class_names);

// The familiar precision/recall/f1-score/support table, two decimals, plus
// one note line per zero-denominator metric.
std::string format_report(const EvalReport& report);

std::string format_confusion(const EvalReport& report);

// Full-precision JSON with the confusion matrix, per-class metrics and the
// given run metadata (seed, config hash, ...).
std::string report_json(const EvalReport& report, const std::map<std::string, std::string>& metadata);

}  // namespace wvdnet
