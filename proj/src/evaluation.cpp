#include "wvdnet/evaluation.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "wvdnet/error.hpp"

namespace wvdnet {

EvalReport build_report(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& predicted,
                        const std::vector<std::string>& class_names) {
  if (truth.size() != predicted.size()) throw InvalidArgument("evaluate: truth/prediction count mismatch");
  if (truth.empty()) throw InvalidArgument("evaluate: empty test set");
  const std::size_t k = class_names.size();
  if (k == 0) throw InvalidArgument("evaluate: no classes");

  EvalReport r;
  r.class_names = class_names;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= k || predicted[i] >= k) throw InvalidArgument("evaluate: label outside class range");
    ++r.confusion[truth[i]][predicted[i]];
  }
  r.total = truth.size();

  std::size_t correct = 0;
  r.per_class.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += r.confusion[c][j];
      col += r.confusion[j][c];
    }
    const double tp = static_cast<double>(r.confusion[c][c]);
    correct += r.confusion[c][c];
    ClassMetrics& m = r.per_class[c];
    m.support = row;
    m.precision_undefined = col == 0;
    m.recall_undefined = row == 0;
    m.precision = col ? tp / static_cast<double>(col) : 0.0;
    m.recall = row ? tp / static_cast<double>(row) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);

  for (const auto& m : r.per_class) {
    const double w = static_cast<double>(m.support) / static_cast<double>(r.total);
    r.macro_avg.precision += m.precision / static_cast<double>(k);
    r.macro_avg.recall += m.recall / static_cast<double>(k);
    r.macro_avg.f1 += m.f1 / static_cast<double>(k);
    r.weighted_avg.precision += w * m.precision;
    r.weighted_avg.recall += w * m.recall;
    r.weighted_avg.f1 += w * m.f1;
  }
  r.macro_avg.support = r.weighted_avg.support = r.total;
  return r;
}

EvalReport evaluate(Network<float>& net, const ImageSet& test_set, const std::vector<std::string>& class_names) {
  if (net.config().num_classes != class_names.size()) {
    throw InvalidArgument("evaluate: network has " + std::to_string(net.config().num_classes) + " classes, data has " +
                          std::to_string(class_names.size()));
  }
  if (test_set.size() == 0) throw InvalidArgument("evaluate: empty test set");
  return build_report(test_set.labels, predict_classes(net, test_set), class_names);
}

std::string format_report(const EvalReport& r) {
  int width = static_cast<int>(std::string("weighted avg").size());
  for (const auto& n : r.class_names) width = std::max(width, static_cast<int>(n.size()));

  std::string out;
  char buf[512];
  auto row = [&](const std::string& name, const ClassMetrics& m) {
    std::snprintf(buf, sizeof buf, "%*s  %9.2f %9.2f %9.2f %9zu\n", width, name.c_str(), m.precision, m.recall, m.f1,
                  m.support);
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "%*s  %9s %9s %9s %9s\n\n", width, "", "precision", "recall", "f1-score", "support");
  out += buf;
  for (std::size_t c = 0; c < r.per_class.size(); ++c) row(r.class_names[c], r.per_class[c]);
  out += "\n";
  std::snprintf(buf, sizeof buf, "%*s  %9s %9s %9.2f %9zu\n", width, "accuracy", "", "", r.accuracy, r.total);
  out += buf;
  row("macro avg", r.macro_avg);
  row("weighted avg", r.weighted_avg);

  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    if (r.per_class[c].precision_undefined) {
      out += "note: precision for '" + r.class_names[c] + "' has no predicted samples; reported as 0\n";
    }
    if (r.per_class[c].recall_undefined) {
      out += "note: recall for '" + r.class_names[c] + "' has no true samples; reported as 0\n";
    }
  }
  return out;
}

std::string format_confusion(const EvalReport& r) {
  std::size_t width = 6;
  for (const auto& n : r.class_names) width = std::max(width, n.size());
  std::string out;
  char buf[64];
  out += std::string(width, ' ');
  for (std::size_t j = 0; j < r.class_names.size(); ++j) {
    std::snprintf(buf, sizeof buf, " %6zu", j);
    out += buf;
  }
  out += "\n";
  for (std::size_t i = 0; i < r.class_names.size(); ++i) {
    out += std::string(width - r.class_names[i].size(), ' ') + r.class_names[i];
    for (std::size_t v : r.confusion[i]) {
      std::snprintf(buf, sizeof buf, " %6zu", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

namespace {

nlohmann::ordered_json metrics_json(const ClassMetrics& m) {
  nlohmann::ordered_json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["support"] = m.support;
  return j;
}

}  // namespace

std::string report_json(const EvalReport& r, const std::map<std::string, std::string>& metadata) {
  nlohmann::ordered_json j;
  j["metadata"] = metadata;
  j["class_names"] = r.class_names;
  j["confusion"] = r.confusion;
  j["accuracy"] = r.accuracy;
  j["total"] = r.total;
  auto& per = j["per_class"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    auto m = metrics_json(r.per_class[c]);
    m["name"] = r.class_names[c];
    m["precision_undefined"] = r.per_class[c].precision_undefined;
    m["recall_undefined"] = r.per_class[c].recall_undefined;
    per.push_back(std::move(m));
  }
  j["macro_avg"] = metrics_json(r.macro_avg);
  j["weighted_avg"] = metrics_json(r.weighted_avg);
  return j.dump(2) + "\n";
}

}  // namespace wvdnet
