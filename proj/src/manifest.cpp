#include "wvdnet/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "wvdnet/csv.hpp"
#include "wvdnet/error.hpp"
#include "wvdnet/fileutil.hpp"
#include "wvdnet/rng.hpp"
#include "wvdnet/wav.hpp"

namespace fs = std::filesystem;

namespace wvdnet {

std::string to_string(DatasetSource source) {
  switch (source) {
    case DatasetSource::urbansound8k: return "urbansound8k";
    case DatasetSource::esc50: return "esc50";
    case DatasetSource::folder_per_class: return "folder_per_class";
  }
  return "?";
}

DatasetSource dataset_source_from_string(const std::string& s) {
  if (s == "urbansound8k") return DatasetSource::urbansound8k;
  if (s == "esc50") return DatasetSource::esc50;
  if (s == "folder_per_class") return DatasetSource::folder_per_class;
  throw InvalidArgument("unknown dataset source '" + s + "' (urbansound8k, esc50, folder_per_class)");
}

void DatasetManifest::validate() const {
  if (class_names.empty()) throw DataError("manifest: no classes");
  std::set<std::string> seen;
  for (const auto& n : class_names) {
    if (n.empty()) throw DataError("manifest: empty class name");
    if (!seen.insert(n).second) throw DataError("manifest: duplicate class name '" + n + "'");
  }
  for (const auto& r : records) {
    if (r.label >= class_names.size()) {
      throw DataError("manifest: " + r.path.string() + " has label " + std::to_string(r.label) + " outside " +
                      std::to_string(class_names.size()) + " classes");
    }
    if (r.fold && *r.fold < 1) throw DataError("manifest: " + r.path.string() + " has fold < 1");
  }
}

namespace {

// Reads only as much of the file as the header needs in the common case.
double header_duration(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string head(4096, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  try {
    // Headers report the data chunk size; pretend the body is present.
    const auto size = fs::file_size(path);
    std::string probe = head;
    if (probe.size() < size) probe.resize(static_cast<std::size_t>(size), '\0');
    const WavInfo info = wav_info(probe);
    return static_cast<double>(info.frames) / info.sample_rate_hz;
  } catch (const std::exception&) {
    return 0.0;
  }
}

long parse_int(const std::string& s, std::size_t row, const std::string& column) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw DataError("manifest: row " + std::to_string(row) + ": column " + column + " is not an integer: '" + s + "'");
  }
  return v;
}

struct CsvLayout {
  fs::path csv;
  std::string file_col, fold_col, id_col, name_col;
  long max_id;
};

DatasetManifest load_csv_manifest(const fs::path& root, DatasetSource source, const CsvLayout& layout) {
  if (!fs::is_regular_file(layout.csv)) throw DataError("manifest: metadata file not found: " + layout.csv.string());
  const CsvTable table(read_file(layout.csv));
  table.require({layout.file_col, layout.fold_col, layout.id_col, layout.name_col});

  std::map<long, std::string> names;
  DatasetManifest m;
  m.source = source;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const std::size_t row = i + 2;  // 1-based, after the header
    const long id = parse_int(table.get(i, layout.id_col), row, layout.id_col);
    if (id < 0 || id > layout.max_id) {
      throw DataError("manifest: row " + std::to_string(row) + ": unknown class id " + std::to_string(id) +
                      " (valid ids 0-" + std::to_string(layout.max_id) + ")");
    }
    const long fold = parse_int(table.get(i, layout.fold_col), row, layout.fold_col);
    if (fold < 1) throw DataError("manifest: row " + std::to_string(row) + ": fold must be >= 1");
    const std::string& name = table.get(i, layout.name_col);
    auto [it, inserted] = names.emplace(id, name);
    if (!inserted && it->second != name) {
      throw DataError("manifest: row " + std::to_string(row) + ": class id " + std::to_string(id) + " named '" + name +
                      "', earlier '" + it->second + "'");
    }
    ClipRecord r;
    r.path = source == DatasetSource::urbansound8k
                 ? root / "audio" / ("fold" + std::to_string(fold)) / table.get(i, layout.file_col)
                 : root / "audio" / table.get(i, layout.file_col);
    if (!fs::is_regular_file(r.path)) {
      throw DataError("manifest: row " + std::to_string(row) + ": referenced file missing: " + r.path.string());
    }
    r.label = static_cast<std::size_t>(id);
    r.class_name = name;
    r.fold = static_cast<int>(fold);
    r.duration_s = header_duration(r.path);
    m.records.push_back(std::move(r));
  }
  if (names.empty()) throw DataError("manifest: " + layout.csv.string() + " has no rows");
  const long top = names.rbegin()->first;
  for (long id = 0; id <= top; ++id) {
    const auto it = names.find(id);
    m.class_names.push_back(it != names.end() ? it->second : "class_" + std::to_string(id));
  }
  return m;
}

bool is_wav(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".wav";
}

DatasetManifest load_folder_manifest(const fs::path& root) {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw DataError("manifest: no class directories under " + root.string());
  DatasetManifest m;
  m.source = DatasetSource::folder_per_class;
  for (std::size_t c = 0; c < dirs.size(); ++c) {
    m.class_names.push_back(dirs[c].filename().string());
    for (const auto& e : fs::directory_iterator(dirs[c])) {
      if (!e.is_regular_file() || !is_wav(e.path())) continue;
      ClipRecord r;
      r.path = e.path();
      r.label = c;
      r.class_name = m.class_names.back();
      r.duration_s = header_duration(r.path);
      m.records.push_back(std::move(r));
    }
  }
  return m;
}

}  // namespace

DatasetManifest load_manifest(const fs::path& root, DatasetSource source) {
  if (!fs::is_directory(root)) throw DataError("manifest: dataset root not found: " + root.string());
  DatasetManifest m;
  switch (source) {
    case DatasetSource::urbansound8k:
      m = load_csv_manifest(root, source,
                            {root / "metadata" / "UrbanSound8K.csv", "slice_file_name", "fold", "classID", "class", 9});
      break;
    case DatasetSource::esc50:
      m = load_csv_manifest(root, source, {root / "meta" / "esc50.csv", "filename", "fold", "target", "category", 49});
      break;
    case DatasetSource::folder_per_class: m = load_folder_manifest(root); break;
  }
  std::stable_sort(m.records.begin(), m.records.end(),
                   [](const ClipRecord& a, const ClipRecord& b) { return a.path < b.path; });
  m.validate();
  return m;
}

namespace {

ManifestSplit take(const DatasetManifest& m, const std::vector<bool>& is_test) {
  ManifestSplit out{DatasetManifest{{}, m.class_names, m.source}, DatasetManifest{{}, m.class_names, m.source}};
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    (is_test[i] ? out.second : out.first).records.push_back(m.records[i]);
  }
  return out;
}

template <typename V>
void shuffle(V& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

ManifestSplit split_holdout(const DatasetManifest& manifest, double train_fraction, std::uint64_t seed,
                            bool stratified) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("split_holdout: fraction must be in (0, 1), got " + std::to_string(train_fraction));
  }
  std::vector<std::vector<std::size_t>> groups;
  if (stratified) {
    groups.resize(manifest.class_names.size());
    for (std::size_t i = 0; i < manifest.records.size(); ++i) groups.at(manifest.records[i].label).push_back(i);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      if (groups[c].empty()) {
        throw DataError("split_holdout: class '" + manifest.class_names[c] + "' has no records");
      }
    }
  } else {
    groups.emplace_back(manifest.records.size());
    for (std::size_t i = 0; i < manifest.records.size(); ++i) groups[0][i] = i;
  }
  Rng rng(seed);
  std::vector<bool> is_test(manifest.records.size(), false);
  for (auto& g : groups) {
    shuffle(g, rng);
    const auto n_test = static_cast<std::size_t>(std::lround((1.0 - train_fraction) * static_cast<double>(g.size())));
    for (std::size_t j = 0; j < n_test && j < g.size(); ++j) is_test[g[j]] = true;
  }
  return take(manifest, is_test);
}

ManifestSplit split_folds(const DatasetManifest& manifest, int test_fold) {
  std::vector<bool> is_test(manifest.records.size(), false);
  bool found = false;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& f = manifest.records[i].fold;
    if (!f) throw DataError("split_folds: " + manifest.records[i].path.string() + " has no fold");
    is_test[i] = *f == test_fold;
    found = found || is_test[i];
  }
  if (!found) throw InvalidArgument("split_folds: unknown fold " + std::to_string(test_fold));
  return take(manifest, is_test);
}

}  // namespace wvdnet
