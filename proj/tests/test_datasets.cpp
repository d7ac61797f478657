#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "wvdnet/csv.hpp"
#include "wvdnet/error.hpp"
#include "wvdnet/fileutil.hpp"
#include "wvdnet/kernels.hpp"
#include "wvdnet/manifest.hpp"
#include "wvdnet/pipeline.hpp"
#include "wvdnet/store.hpp"
#include "wvdnet/wav.hpp"

using namespace wvdnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("wvdnet_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void touch_wav(const fs::path& p, double seconds = 0.01, double rate = 8000) {
  fs::create_directories(p.parent_path());
  write_wav({Signal(std::vector<double>(static_cast<std::size_t>(seconds * rate), 0.0), rate)}, p);
}

Signal tone(double f, double rate, double seconds) {
  std::vector<double> x(static_cast<std::size_t>(std::llround(rate * seconds)));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * std::sin(2 * std::numbers::pi * f * i / rate);
  return Signal(x, rate);
}

DatasetManifest synthetic_manifest(std::size_t per_class, std::size_t classes) {
  DatasetManifest m;
  for (std::size_t c = 0; c < classes; ++c) m.class_names.push_back("c" + std::to_string(c));
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      ClipRecord r;
      r.path = "clip_" + std::to_string(c) + "_" + std::to_string(i) + ".wav";
      r.label = c;
      r.class_name = m.class_names[c];
      r.fold = static_cast<int>(i % 5) + 1;
      m.records.push_back(r);
    }
  return m;
}

}  // namespace

TEST_CASE("decode_wav") {
  const auto mono = decode_wav(oracle::wav_pcm16({{0, 16384, -32768}}, 8000));
  REQUIRE(mono.size() == 1);
  CHECK(mono[0].samples == std::vector<double>{0.0, 0.5, -1.0});
  CHECK(mono[0].sample_rate_hz == 8000);

  const auto stereo = decode_wav(oracle::wav_pcm16({{1, 2, 3}, {-1, -2, -3}}, 44100));
  REQUIRE(stereo.size() == 2);
  CHECK(stereo[0].size() == stereo[1].size());
  CHECK(stereo[1].samples[2] == -3.0 / 32768);

  std::string list = "LIST";
  oracle::put_le(list, 5, 4);
  list += "INFOx";
  list.push_back('\0');  // pad to even
  const auto with_list = decode_wav(oracle::wav_pcm16({{7, -7, 100}}, 8000, list));
  CHECK(with_list[0].samples == decode_wav(oracle::wav_pcm16({{7, -7, 100}}, 8000))[0].samples);

  const std::string good = oracle::wav_pcm16({{1, 2, 3, 4}}, 8000);
  try {
    decode_wav(good.substr(0, good.size() - 2));
    FAIL("truncated data accepted");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("'data'") != std::string::npos);
  }
  std::string alaw = good;
  alaw[20] = 6;  // format tag
  try {
    decode_wav(alaw);
    FAIL("a-law accepted");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("'fmt '") != std::string::npos);
  }
  CHECK_THROWS_AS(decode_wav("RIFF"), DataError);
  CHECK_THROWS_AS(decode_wav(std::string(44, '\0')), DataError);

  // float32 and the library encoder round-trip
  const Signal s({0.25, -0.125, 0.75}, 22050);
  const auto f = decode_wav(encode_wav({s}, WavEncoding::float32));
  CHECK(f[0].samples == s.samples);
  const auto p = decode_wav(encode_wav({s, s}));
  CHECK(p.size() == 2);
  CHECK(p[0].samples[0] == 0.25);
  CHECK(wav_info(encode_wav({s})).frames == 3);
}

TEST_CASE("csv reader") {
  const auto rows = parse_csv("a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\n\n2,,3");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][1] == "x, y");
  CHECK(rows[1][2] == "say \"hi\"");
  CHECK(rows[2] == std::vector<std::string>{"2", "", "3"});
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("plain") == "plain");
  CHECK_THROWS_AS(parse_csv("\"open"), DataError);
  const CsvTable t("x,y\n1,2\n");
  CHECK(t.get(0, "y") == "2");
  CHECK_THROWS_AS(t.require({"x", "z"}), DataError);
}

TEST_CASE("folder_per_class manifest") {
  TempDir d("fpc");
  touch_wav(d.path / "dragon_wagon" / "b.wav");
  touch_wav(d.path / "dragon_wagon" / "a.WAV");
  touch_wav(d.path / "aav" / "z.wav");
  write_file_atomic(d.path / "aav" / "notes.txt", "ignored");
  const DatasetManifest m = load_manifest(d.path, DatasetSource::folder_per_class);
  CHECK(m.records.size() == 3);
  CHECK(m.class_names == std::vector<std::string>{"aav", "dragon_wagon"});
  for (std::size_t i = 1; i < m.records.size(); ++i) CHECK(m.records[i - 1].path < m.records[i].path);
  CHECK(m.records[0].label == 0);
  CHECK(!m.records[0].fold);
  CHECK(std::abs(m.records[0].duration_s - 0.01) < 1e-9);

  CHECK_THROWS_AS(load_manifest(d.path / "missing", DatasetSource::folder_per_class), DataError);
}

TEST_CASE("UrbanSound8K manifest") {
  TempDir d("us8k");
  touch_wav(d.path / "audio" / "fold1" / "1-a.wav");
  touch_wav(d.path / "audio" / "fold2" / "2-b.wav");
  fs::create_directories(d.path / "metadata");
  const std::string header = "slice_file_name,fsID,start,end,salience,fold,classID,class\n";
  write_file_atomic(d.path / "metadata" / "UrbanSound8K.csv",
                    header + "2-b.wav,1,0,1,1,2,3,dog_bark\n1-a.wav,1,0,1,1,1,0,air_conditioner\n");
  const DatasetManifest m = load_manifest(d.path, DatasetSource::urbansound8k);
  REQUIRE(m.records.size() == 2);
  CHECK(m.records[0].path.filename() == "1-a.wav");
  CHECK(m.records[0].fold == 1);
  CHECK(m.class_names.size() == 4);
  CHECK(m.class_names[3] == "dog_bark");

  write_file_atomic(d.path / "metadata" / "UrbanSound8K.csv", header + "1-a.wav,1,0,1,1,1,10,bogus\n");
  try {
    load_manifest(d.path, DatasetSource::urbansound8k);
    FAIL("class 10 accepted");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  write_file_atomic(d.path / "metadata" / "UrbanSound8K.csv", header + "1-a.wav,1,0,1,1,1,0,x\nnope.wav,1,0,1,1,1,0,x\n");
  try {
    load_manifest(d.path, DatasetSource::urbansound8k);
    FAIL("missing file accepted");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  write_file_atomic(d.path / "metadata" / "UrbanSound8K.csv", "slice_file_name,fold\n1-a.wav,1\n");
  CHECK_THROWS_AS(load_manifest(d.path, DatasetSource::urbansound8k), DataError);
}

TEST_CASE("ESC-50 manifest has five folds") {
  TempDir d("esc");
  std::string csv = "filename,fold,target,category,esc10,src_file,take\n";
  for (int fold = 1; fold <= 5; ++fold)
    for (int t = 0; t < 3; ++t) {
      const std::string name = std::to_string(fold) + "-" + std::to_string(t) + ".wav";
      touch_wav(d.path / "audio" / name);
      csv += name + "," + std::to_string(fold) + "," + std::to_string(t * 20) + ",cat" + std::to_string(t * 20) +
             ",False,1,A\n";
    }
  fs::create_directories(d.path / "meta");
  write_file_atomic(d.path / "meta" / "esc50.csv", csv);
  const DatasetManifest m = load_manifest(d.path, DatasetSource::esc50);
  std::set<int> folds;
  for (const auto& r : m.records) folds.insert(*r.fold);
  CHECK(folds.size() == 5);
  CHECK(m.class_names.size() == 41);
  CHECK(m.class_names[40] == "cat40");
}

TEST_CASE("split_holdout") {
  const DatasetManifest m = synthetic_manifest(10, 3);
  const auto [train, test] = split_holdout(m, 0.8, 17);
  CHECK(train.records.size() == 24);
  CHECK(test.records.size() == 6);
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t n = 0;
    for (const auto& r : test.records) n += r.label == c;
    CHECK(n == 2);
  }
  std::set<std::string> seen;
  for (const auto& r : train.records) seen.insert(r.path.string());
  for (const auto& r : test.records) CHECK(seen.insert(r.path.string()).second);
  CHECK(seen.size() == m.records.size());

  const auto again = split_holdout(m, 0.8, 17);
  CHECK(again.first.records == train.records);
  CHECK(again.second.records == test.records);
  CHECK(split_holdout(m, 0.8, 18).second.records != test.records);

  const auto flat = split_holdout(synthetic_manifest(7, 2), 0.7, 1, false);
  CHECK(flat.second.records.size() == 4);  // round(0.3 * 14)

  CHECK_THROWS_AS(split_holdout(m, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(split_holdout(m, 0.0, 1), InvalidArgument);
  DatasetManifest gap = m;
  gap.class_names.push_back("empty");
  CHECK_THROWS_AS(split_holdout(gap, 0.8, 1), DataError);
}

TEST_CASE("split_folds") {
  const DatasetManifest m = synthetic_manifest(10, 2);
  const auto [train, test] = split_folds(m, 3);
  CHECK(test.records.size() == 4);
  for (const auto& r : test.records) CHECK(r.fold == 3);
  for (const auto& r : train.records) CHECK(r.fold != 3);
  CHECK(train.records.size() + test.records.size() == m.records.size());

  DatasetManifest single = m;
  for (auto& r : single.records) r.fold = 2;
  CHECK(split_folds(single, 2).second.records == single.records);
  CHECK(split_folds(single, 2).first.records.empty());

  CHECK_THROWS_AS(split_folds(m, 9), InvalidArgument);
  DatasetManifest nofold = m;
  nofold.records[0].fold.reset();
  CHECK_THROWS_AS(split_folds(nofold, 1), DataError);
}

TEST_CASE("clip pipeline") {
  PipelineConfig cfg;
  const Signal mil = tone(300, 4960, 5.0);
  const Signal w = prepare_signal({mil}, cfg);
  CHECK(w.sample_rate_hz == 4960);
  CHECK(w.size() == 19840);

  const Signal cd = prepare_signal({tone(440, 44100, 1.0)}, cfg);
  CHECK(cd.sample_rate_hz == 4410);
  CHECK(cd.size() == 17640);

  const TFDImage img = clip_to_image({tone(500, 8000, 4.0)}, cfg);
  CHECK(img.rows == 300);
  CHECK(img.cols == 300);
  for (double v : img.values) CHECK((v >= 0.0 && v <= 1.0));
  CHECK(img.source_rate_hz == 4000);

  const TFDImage mil_img = clip_to_image({mil}, cfg);
  CHECK(mil_img.source_rate_hz == 4960);

  const TFDImage serial = clip_to_image({tone(500, 8000, 4.0)}, cfg, kernels::Backend::serial);
  CHECK(serial.values == img.values);
}

TEST_CASE("preprocess store") {
  TempDir d("store");
  PipelineConfig cfg;
  cfg.image_rows = 40;
  cfg.image_cols = 30;

  DatasetManifest empty;
  empty.class_names = {"x"};
  const auto e = preprocess_dataset(empty, cfg, d.path / "empty");
  CHECK(e.processed == 0);
  CHECK(read_file(d.path / "empty" / kStoreIndex) == "file,label,fold\n");
  CHECK(open_store(d.path / "empty").entries.empty());

  DatasetManifest m;
  m.class_names = {"low", "high"};
  for (int i = 0; i < 4; ++i) {
    const fs::path p = d.path / "wav" / ("c" + std::to_string(i) + ".wav");
    fs::create_directories(p.parent_path());
    write_wav({tone(i % 2 ? 700 : 200, 8000, 1.0 + 0.5 * i)}, p);
    m.records.push_back({p, static_cast<std::size_t>(i % 2), m.class_names[i % 2], i + 1, 0.0});
  }
  const fs::path bad = d.path / "wav" / "broken.wav";
  write_file_atomic(bad, "RIFF....WAVEjunk");
  m.records.push_back({bad, 0, "low", 1, 0.0});

  const auto s1 = preprocess_dataset(m, cfg, d.path / "s1");
  CHECK(s1.processed == 4);
  REQUIRE(s1.skipped.size() == 1);
  CHECK(s1.skipped[0].rfind(bad.string() + "\t", 0) == 0);
  CHECK(!s1.up_to_date);
  CHECK(s1.per_class == std::vector<std::size_t>{2, 2});

  const ArrayStore st = open_store(d.path / "s1");
  CHECK(st.rows == 40);
  CHECK(st.entries.size() == 4);
  CHECK(st.entries[2].fold == 3);
  const ImageSet all = st.load_all();
  CHECK(all.size() == 4);
  CHECK(all.labels == std::vector<std::size_t>{0, 1, 0, 1});
  for (float v : all.pixels) CHECK((v >= 0.0f && v <= 1.0f));

  // array bytes are the float32 image
  const TFDImage ref = clip_to_image(read_wav(m.records[0].path), cfg);
  CHECK(read_file(d.path / "s1" / st.entries[0].file) == encode_f32(ref.values));

  // rerun: nothing rewritten
  const auto before = fs::last_write_time(d.path / "s1" / kStoreIndex);
  const auto s2 = preprocess_dataset(m, cfg, d.path / "s1");
  CHECK(s2.up_to_date);
  CHECK(s2.processed == 4);
  CHECK(fs::last_write_time(d.path / "s1" / kStoreIndex) == before);

  // one worker gives the same bytes
  const int threads = kernels::num_threads();
  kernels::set_num_threads(1);
  preprocess_dataset(m, cfg, d.path / "s3");
  kernels::set_num_threads(threads);
  for (const char* f : {kStoreIndex, kStoreClasses, kStoreMeta}) {
    CHECK(read_file(d.path / "s1" / f) == read_file(d.path / "s3" / f));
  }
  for (const auto& entry : st.entries) CHECK(read_file(d.path / "s1" / entry.file) == read_file(d.path / "s3" / entry.file));

  // a changed config rebuilds
  cfg.image_cols = 31;
  CHECK(!preprocess_dataset(m, cfg, d.path / "s1").up_to_date);
  CHECK(open_store(d.path / "s1").cols == 31);
}
