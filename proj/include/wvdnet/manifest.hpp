#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wvdnet {

enum class DatasetSource { urbansound8k, esc50, folder_per_class };

std::string to_string(DatasetSource source);
DatasetSource dataset_source_from_string(const std::string& s);

struct ClipRecord {
  std::filesystem::path path;
  std::size_t label = 0;
  std::string class_name;
  std::optional<int> fold;
  double duration_s = 0.0;  // from the WAV header; 0 when the header is unreadable

  bool operator==(const ClipRecord&) const = default;
};

struct DatasetManifest {
  std::vector<ClipRecord> records;
  std::vector<std::string> class_names;
  DatasetSource source = DatasetSource::folder_per_class;

  // Throws DataError when names are empty/duplicated or a label is out of range.
  void validate() const;
};

// UrbanSound8K: <root>/metadata/UrbanSound8K.csv, audio under <root>/audio/fold<N>/.
// ESC-50:       <root>/meta/esc50.csv, audio under <root>/audio/.
// folder_per_class: <root>/<class>/*.wav, classes in sorted directory order.
// Records are sorted by path.
DatasetManifest load_manifest(const std::filesystem::path& root, DatasetSource source);

using ManifestSplit = std::pair<DatasetManifest, DatasetManifest>;  // train, test

// train_fraction in (0, 1). Stratified: each class contributes
// round((1 - train_fraction) * n_c) test records, drawn by a seeded shuffle.
ManifestSplit split_holdout(const DatasetManifest& manifest, double train_fraction, std::uint64_t seed,
                            bool stratified = true);

ManifestSplit split_folds(const DatasetManifest& manifest, int test_fold);

}  // namespace wvdnet
