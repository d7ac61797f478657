#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wvdnet/manifest.hpp"
#include "wvdnet/pipeline.hpp"
#include "wvdnet/train.hpp"

namespace wvdnet {

// On-disk layout of a preprocessed store:
//   arrays/NNNNNN_<stem>.f32  rows*cols little-endian float32, row-major
//   index.csv                 file,label,fold  (file relative to the store)
//   classes.txt               one class name per line, in label order
//   skipped.txt               <clip path>\t<reason>, one per line
//   store.meta                key=value; written last
inline constexpr const char* kStoreIndex = "index.csv";
inline constexpr const char* kStoreClasses = "classes.txt";
inline constexpr const char* kStoreSkips = "skipped.txt";
inline constexpr const char* kStoreMeta = "store.meta";

struct PreprocessSummary {
  std::size_t processed = 0;
  std::vector<std::size_t> per_class;
  std::vector<std::string> skipped;  // "<path>\t<reason>"
  bool up_to_date = false;           // nothing was rewritten
  std::string fingerprint;
};

// Decode -> clip_to_image for every record, clips in parallel. Output files
// depend only on the manifest and config, so reruns are byte-identical; a
// rerun whose inputs fingerprint matches store.meta rewrites nothing.
PreprocessSummary preprocess_dataset(const DatasetManifest& manifest, const PipelineConfig& cfg,
                                     const std::filesystem::path& out_dir);

struct StoreEntry {
  std::string file;  // relative to the store root
  std::size_t label = 0;
  std::optional<int> fold;
};

struct ArrayStore {
  std::filesystem::path root;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::string> class_names;
  std::vector<StoreEntry> entries;

  // Entries as manifest records (path = array file), for split_holdout/split_folds.
  DatasetManifest as_manifest() const;
  ImageSet load(const std::vector<ClipRecord>& records) const;
  ImageSet load_all() const;
};

ArrayStore open_store(const std::filesystem::path& dir);

std::vector<float> read_f32_array(const std::filesystem::path& path, std::size_t expected_count);
std::string encode_f32(const std::vector<double>& values);

}  // namespace wvdnet
