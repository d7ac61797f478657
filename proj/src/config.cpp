#include "wvdnet/config.hpp"

#include <sstream>

#include "wvdnet/error.hpp"
#include "wvdnet/fileutil.hpp"

namespace wvdnet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t n = 0;
  try {
    n = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || v[0] == '-') {
    throw UsageError("config key " + key + ": '" + v + "' is not a non-negative integer");
  }
  return n;
}

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      // locations
      {"dataset_root", "data"},
      {"source", "folder_per_class"},
      {"store_dir", "store"},
      {"model", ""},  // empty: <out>/model.wvdn
      {"out", "out"},
      // pipeline
      {"target_rate_hz", "4000"},
      {"clip_seconds", "4"},
      {"image_rows", "300"},
      {"image_cols", "300"},
      {"lag_window_len", "0"},
      {"n_freq_bins", "512"},
      {"max_time_rows", "1200"},
      {"log_compress", "false"},
      // split
      {"train_fraction", "0.8"},
      {"stratified", "true"},
      {"test_fold", "0"},  // 0: holdout split instead of folds
      {"eval_split", "test"},
      // network and training
      {"conv_channels", "16,32,64"},
      {"hidden_units", "500"},
      {"dropout", "0.25"},
      {"epochs", "20"},
      {"batch_size", "32"},
      {"learning_rate", "0.001"},
      {"momentum", "0.9"},
      {"seed", "0"},
      {"threads", "0"},
      // synthetic data
      {"num_classes", "3"},
      {"clips_per_class", "50"},
      {"synth_rate_hz", "8000"},
      {"synth_seconds", "4"},
      {"tone_low_hz", "250"},
      {"tone_high_hz", "750"},
      // streaming
      {"window_s", "4"},
      {"stride_s", "1"},
      {"smooth_windows", "0"},  // 0: off; otherwise odd majority-vote span
  };
  return d;
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

bool RunConfig::is_path_key(const std::string& key) {
  return key == "dataset_root" || key == "store_dir" || key == "model" || key == "out";
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  it->second = value;
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("expected key=value, got '" + assignment + "'");
  set(trim(std::string_view(assignment).substr(0, eq)), trim(std::string_view(assignment).substr(eq + 1)));
}

void RunConfig::load_text(std::string_view text, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(origin + ":" + std::to_string(no) + ": expected 'key = value'");
    try {
      set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(origin + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw UsageError("cannot read config file " + path.string());
  }
  load_text(text, path.string());
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw UsageError("config key " + key + ": '" + v + "' is not a number");
  return d;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const { return parse_u64(key, get(key)); }

std::size_t RunConfig::get_size(const std::string& key) const { return static_cast<std::size_t>(get_u64(key)); }

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("config key " + key + ": '" + v + "' is not a boolean");
}

std::vector<std::size_t> RunConfig::get_size_list(const std::string& key) const {
  std::vector<std::size_t> out;
  std::istringstream in(get(key));
  for (std::string item; std::getline(in, item, ',');) {
    out.push_back(static_cast<std::size_t>(parse_u64(key, trim(item))));
  }
  if (out.empty()) throw UsageError("config key " + key + " is empty");
  return out;
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = fnv1a64("wvdnet-config");
  for (const auto& [k, v] : values_) {
    if (!is_path_key(k)) h = fnv1a64(k + "=" + v + "\n", h);
  }
  return hex64(h);
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.target_rate_hz = get_double("target_rate_hz");
  p.clip_seconds = get_double("clip_seconds");
  p.image_rows = get_size("image_rows");
  p.image_cols = get_size("image_cols");
  p.lag_window_len = get_size("lag_window_len");
  p.n_freq_bins = get_size("n_freq_bins");
  p.max_time_rows = get_size("max_time_rows");
  p.log_compress = get_bool("log_compress");
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return p;
}

TrainConfig RunConfig::training() const {
  TrainConfig t;
  t.epochs = get_size("epochs");
  t.batch_size = get_size("batch_size");
  t.learning_rate = get_double("learning_rate");
  t.momentum = get_double("momentum");
  t.seed = get_u64("seed");
  if (t.batch_size == 0) throw UsageError("batch_size must be positive");
  if (!(t.learning_rate >= 0)) throw UsageError("learning_rate must be non-negative");
  return t;
}

ReferenceOptions RunConfig::network(std::size_t num_classes) const {
  ReferenceOptions o;
  o.rows = get_size("image_rows");
  o.cols = get_size("image_cols");
  o.num_classes = num_classes;
  o.conv_channels = get_size_list("conv_channels");
  o.hidden_units = get_size("hidden_units");
  o.dropout = get_double("dropout");
  o.seed = get_u64("seed");
  if (!(o.dropout >= 0 && o.dropout < 1)) throw UsageError("dropout must be in [0, 1)");
  return o;
}

SynthConfig RunConfig::synth() const {
  SynthConfig s;
  s.num_classes = get_size("num_classes");
  s.clips_per_class = get_size("clips_per_class");
  s.seed = get_u64("seed");
  s.sample_rate_hz = get_double("synth_rate_hz");
  s.seconds = get_double("synth_seconds");
  s.tone_low_hz = get_double("tone_low_hz");
  s.tone_high_hz = get_double("tone_high_hz");
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return s;
}

}  // namespace wvdnet
