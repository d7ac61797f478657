#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wvdnet/network.hpp"
#include "wvdnet/pipeline.hpp"
#include "wvdnet/synth.hpp"
#include "wvdnet/train.hpp"

namespace wvdnet {

// Flat key = value settings. Every key has a default; unknown keys are
// rejected with UsageError. Values are kept as text and parsed on access.
class RunConfig {
 public:
  RunConfig();

  // "key = value" lines, '#' starts a comment, blank lines ignored.
  void load_text(std::string_view text, const std::string& origin = "config");
  void load_file(const std::filesystem::path& path);
  // "key=value"
  void set_assignment(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::size_t> get_size_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Every key in sorted order, one "key = value" per line.
  std::string dump() const;
  // FNV-1a over the keys that affect results; directory and file locations
  // are left out so the same run in another place hashes the same.
  std::string hash() const;

  PipelineConfig pipeline() const;
  TrainConfig training() const;
  ReferenceOptions network(std::size_t num_classes) const;
  SynthConfig synth() const;

  static bool is_path_key(const std::string& key);

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace wvdnet
