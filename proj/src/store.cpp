#include "wvdnet/store.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wvdnet/csv.hpp"
#include "wvdnet/error.hpp"
#include "wvdnet/fileutil.hpp"
#include "wvdnet/wav.hpp"

namespace fs = std::filesystem;

namespace wvdnet {


std::string encode_f32(const std::vector<double>& values) {
  std::string out(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = static_cast<float>(values[i]);
    std::uint32_t b;
    std::memcpy(&b, &f, 4);
    for (int k = 0; k < 4; ++k) out[4 * i + k] = static_cast<char>((b >> (8 * k)) & 0xff);
  }
  return out;
}

std::vector<float> read_f32_array(const fs::path& path, std::size_t expected_count) {
  const std::string bytes = read_file(path);
  if (bytes.size() != expected_count * 4) {
    throw DataError("store: " + path.string() + " has " + std::to_string(bytes.size()) + " bytes, expected " +
                    std::to_string(expected_count * 4));
  }
  std::vector<float> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    std::uint32_t b = 0;
    for (int k = 0; k < 4; ++k) b |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + k])) << (8 * k);
    std::memcpy(&out[i], &b, 4);
  }
  return out;
}

namespace {

std::map<std::string, std::string> read_meta(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string array_name(std::size_t i, const fs::path& clip) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu_", i);
  return "arrays/" + std::string(buf) + clip.stem().string() + ".f32";
}

std::string fingerprint(const DatasetManifest& m, const PipelineConfig& cfg) {
  std::uint64_t h = fnv1a64("wvdnet-store-1;" + cfg.canonical() + ";" + to_string(m.source));
  for (const auto& n : m.class_names) h = fnv1a64(n + "\n", h);
  for (const auto& r : m.records) {
    std::string line = r.path.string() + "|" + std::to_string(r.label) + "|" + (r.fold ? std::to_string(*r.fold) : "");
    h = fnv1a64(line, h);
    std::error_code ec;
    h = fnv1a64(fs::is_regular_file(r.path, ec) ? read_file(r.path) : std::string("<missing>"), h);
  }
  return hex64(h);
}

bool store_current(const fs::path& dir, const std::string& fp) {
  if (!fs::is_regular_file(dir / kStoreMeta)) return false;
  try {
    if (read_meta(dir / kStoreMeta)["input_fingerprint"] != fp) return false;
    const ArrayStore s = open_store(dir);
    for (const auto& e : s.entries) {
      if (!fs::is_regular_file(dir / e.file)) return false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

PreprocessSummary preprocess_dataset(const DatasetManifest& manifest, const PipelineConfig& cfg, const fs::path& out_dir) {
  manifest.validate();
  cfg.validate();
  PreprocessSummary summary;
  summary.per_class.assign(manifest.class_names.size(), 0);
  summary.fingerprint = fingerprint(manifest, cfg);

  if (store_current(out_dir, summary.fingerprint)) {
    const ArrayStore s = open_store(out_dir);
    summary.up_to_date = true;
    summary.processed = s.entries.size();
    for (const auto& e : s.entries) ++summary.per_class.at(e.label);
    std::istringstream skips(fs::exists(out_dir / kStoreSkips) ? read_file(out_dir / kStoreSkips) : "");
    for (std::string line; std::getline(skips, line);) summary.skipped.push_back(line);
    return summary;
  }

  fs::create_directories(out_dir / "arrays");
  // A stale meta must not vouch for a half-rewritten store.
  fs::remove(out_dir / kStoreMeta);

  const std::size_t n = manifest.records.size();
  std::vector<std::string> errors(n);
  std::vector<char> ok(n, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    const ClipRecord& r = manifest.records[i];
    try {
      const TFDImage img = clip_to_image(read_wav(r.path), cfg, kernels::Backend::serial);
      write_file_atomic(out_dir / array_name(i, r.path), encode_f32(img.values));
      ok[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  std::string index = "file,label,fold\n";
  std::string skips;
  std::set<std::string> keep;
  for (std::size_t i = 0; i < n; ++i) {
    const ClipRecord& r = manifest.records[i];
    if (!ok[i]) {
      std::string reason = errors[i];
      for (char& c : reason) {
        if (c == '\n' || c == '\t') c = ' ';
      }
      summary.skipped.push_back(r.path.string() + "\t" + reason);
      skips += summary.skipped.back() + "\n";
      continue;
    }
    const std::string file = array_name(i, r.path);
    keep.insert(fs::path(file).filename().string());
    index += csv_escape(file) + "," + std::to_string(r.label) + "," + (r.fold ? std::to_string(*r.fold) : "") + "\n";
    ++summary.processed;
    ++summary.per_class[r.label];
  }
  for (const auto& e : fs::directory_iterator(out_dir / "arrays")) {
    if (!keep.count(e.path().filename().string())) fs::remove(e.path());
  }

  std::string classes;
  for (const auto& c : manifest.class_names) classes += c + "\n";
  std::ostringstream meta;
  meta << "format=wvdnet-store-1\n"
       << "rows=" << cfg.image_rows << "\n"
       << "cols=" << cfg.image_cols << "\n"
       << "source=" << to_string(manifest.source) << "\n"
       << "pipeline=" << cfg.canonical() << "\n"
       << "config_hash=" << hex64(fnv1a64(cfg.canonical())) << "\n"
       << "input_fingerprint=" << summary.fingerprint << "\n"
       << "clips=" << summary.processed << "\n"
       << "skipped=" << summary.skipped.size() << "\n";
  write_file_atomic(out_dir / kStoreIndex, index);
  write_file_atomic(out_dir / kStoreClasses, classes);
  write_file_atomic(out_dir / kStoreSkips, skips);
  write_file_atomic(out_dir / kStoreMeta, meta.str());
  return summary;
}

ArrayStore open_store(const fs::path& dir) {
  if (!fs::is_regular_file(dir / kStoreMeta)) {
    throw DataError("store: " + dir.string() + " is not a complete store (no " + kStoreMeta + ")");
  }
  auto meta = read_meta(dir / kStoreMeta);
  if (meta["format"] != "wvdnet-store-1") throw DataError("store: unsupported format in " + dir.string());
  ArrayStore s;
  s.root = dir;
  try {
    s.rows = std::stoul(meta.at("rows"));
    s.cols = std::stoul(meta.at("cols"));
  } catch (const std::exception&) {
    throw DataError("store: bad rows/cols in " + (dir / kStoreMeta).string());
  }
  std::istringstream classes(read_file(dir / kStoreClasses));
  for (std::string line; std::getline(classes, line);) {
    if (!line.empty()) s.class_names.push_back(line);
  }
  const auto rows = parse_csv(read_file(dir / kStoreIndex));
  if (rows.empty() || rows[0] != std::vector<std::string>{"file", "label", "fold"}) {
    throw DataError("store: index.csv must start with header file,label,fold");
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw DataError("store: index.csv row " + std::to_string(i + 1) + " needs 3 fields");
    StoreEntry e;
    e.file = r[0];
    try {
      e.label = std::stoul(r[1]);
      if (!r[2].empty()) e.fold = std::stoi(r[2]);
    } catch (const std::exception&) {
      throw DataError("store: index.csv row " + std::to_string(i + 1) + " has a malformed number");
    }
    if (e.label >= s.class_names.size()) {
      throw DataError("store: index.csv row " + std::to_string(i + 1) + " label out of range");
    }
    s.entries.push_back(std::move(e));
  }
  return s;
}

DatasetManifest ArrayStore::as_manifest() const {
  DatasetManifest m;
  m.class_names = class_names;
  for (const auto& e : entries) {
    ClipRecord r;
    r.path = root / e.file;
    r.label = e.label;
    r.class_name = class_names.at(e.label);
    r.fold = e.fold;
    m.records.push_back(std::move(r));
  }
  return m;
}

ImageSet ArrayStore::load(const std::vector<ClipRecord>& records) const {
  ImageSet set;
  set.channels = 1;
  set.rows = rows;
  set.cols = cols;
  set.pixels.reserve(records.size() * rows * cols);
  for (const auto& r : records) set.add(read_f32_array(r.path, rows * cols), r.label);
  return set;
}

ImageSet ArrayStore::load_all() const { return load(as_manifest().records); }

}  // namespace wvdnet
