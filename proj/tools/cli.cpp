#include "wvdnet/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include <CLI11.hpp>

#include "wvdnet/checkpoint.hpp"
#include "wvdnet/error.hpp"
#include "wvdnet/evaluation.hpp"
#include "wvdnet/fileutil.hpp"
#include "wvdnet/image_io.hpp"
#include "wvdnet/kernels.hpp"
#include "wvdnet/manifest.hpp"
#include "wvdnet/store.hpp"
#include "wvdnet/stream.hpp"
#include "wvdnet/synth.hpp"
#include "wvdnet/wav.hpp"

namespace fs = std::filesystem;

namespace wvdnet {

namespace {

void apply_threads(const RunConfig& cfg) {
  const std::size_t t = cfg.get_size("threads");
  if (t > 0) kernels::set_num_threads(static_cast<int>(t));
}

fs::path model_path(const RunConfig& cfg) {
  const std::string& m = cfg.get("model");
  return m.empty() ? fs::path(cfg.get("out")) / "model.wvdn" : fs::path(m);
}

struct Splits {
  DatasetManifest train, test;
};

Splits split_store(const RunConfig& cfg, const ArrayStore& store) {
  const DatasetManifest all = store.as_manifest();
  const auto fold = cfg.get_size("test_fold");
  ManifestSplit s = fold > 0 ? split_folds(all, static_cast<int>(fold))
                             : split_holdout(all, cfg.get_double("train_fraction"), cfg.get_u64("seed"),
                                             cfg.get_bool("stratified"));
  return {std::move(s.first), std::move(s.second)};
}

void check_store_shape(const RunConfig& cfg, const ArrayStore& store) {
  if (store.rows != cfg.get_size("image_rows") || store.cols != cfg.get_size("image_cols")) {
    throw DataError("store " + store.root.string() + " holds " + std::to_string(store.rows) + "x" +
                    std::to_string(store.cols) + " images; config asks for " + cfg.get("image_rows") + "x" +
                    cfg.get("image_cols"));
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

void cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const SynthConfig s = cfg.synth();
  const auto files = synth_dataset(s, cfg.get("out"));
  out << "wrote " << files.size() << " clips in " << s.num_classes << " classes to " << cfg.get("out") << "\n";
}

void cmd_preprocess(const RunConfig& cfg, std::ostream& out) {
  apply_threads(cfg);
  const PipelineConfig pipeline = cfg.pipeline();
  const DatasetManifest m = load_manifest(cfg.get("dataset_root"), dataset_source_from_string(cfg.get("source")));
  const PreprocessSummary s = preprocess_dataset(m, pipeline, cfg.get("store_dir"));
  out << (s.up_to_date ? "up to date: " : "wrote ") << s.processed << " arrays to " << cfg.get("store_dir") << " ("
      << s.skipped.size() << " skipped)\n";
  for (std::size_t c = 0; c < m.class_names.size(); ++c) out << "  " << m.class_names[c] << ": " << s.per_class[c] << "\n";
  for (const auto& line : s.skipped) out << "  skipped " << line << "\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  apply_threads(cfg);
  const TrainConfig tc = cfg.training();
  const ArrayStore store = open_store(cfg.get("store_dir"));
  check_store_shape(cfg, store);
  const Splits split = split_store(cfg, store);
  const ImageSet train_set = store.load(split.train.records);
  const ImageSet test_set = store.load(split.test.records);

  NetworkConfig nc = reference_config(cfg.network(store.class_names.size()));
  nc.class_names = store.class_names;
  out << "training on " << train_set.size() << " clips, evaluating on " << test_set.size() << " ("
      << store.class_names.size() << " classes, " << tc.epochs << " epochs)\n";
  TrainResult r = train(nc, train_set, test_set, tc, kernels::Backend::omp, [&](const EpochRecord& e) {
    log << "epoch " << e.epoch << "/" << tc.epochs << "  loss " << fmt("%.4f", e.train_loss) << "  eval_acc "
        << fmt("%.4f", e.eval_accuracy) << "\n";
    log.flush();
  });

  const fs::path dir = cfg.get("out");
  fs::create_directories(dir);
  std::string history = "epoch,train_loss,eval_accuracy\n";
  for (const auto& e : r.history) {
    history += std::to_string(e.epoch) + fmt(",%.17g", e.train_loss) + fmt(",%.17g", e.eval_accuracy) + "\n";
  }
  write_file_atomic(dir / "history.csv", history);
  write_file_atomic(dir / "run.cfg", "# config_hash = " + cfg.hash() + "\n" + cfg.dump());
  save_checkpoint(r.best, dir / "model_best.wvdn");
  save_checkpoint(r.final_net, model_path(cfg));
  out << "wrote " << model_path(cfg).string() << " (final) and model_best.wvdn (epoch " << r.best_epoch << ")\n";
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  apply_threads(cfg);
  Network<float> net = load_checkpoint(model_path(cfg));
  const ArrayStore store = open_store(cfg.get("store_dir"));
  check_store_shape(cfg, store);
  const std::string which = cfg.get("eval_split");
  ImageSet set;
  if (which == "all") {
    set = store.load_all();
  } else if (which == "test" || which == "train") {
    const Splits split = split_store(cfg, store);
    set = store.load(which == "test" ? split.test.records : split.train.records);
  } else {
    throw UsageError("eval_split must be test, train or all");
  }
  const std::vector<std::string> names =
      net.config().class_names.empty() ? store.class_names : net.config().class_names;
  if (names != store.class_names) throw DataError("evaluate: model classes differ from the store's classes");
  const EvalReport report = evaluate(net, set, names);

  const std::string table = format_report(report);
  out << table << "\n" << format_confusion(report);
  const fs::path dir = cfg.get("out");
  fs::create_directories(dir);
  write_file_atomic(dir / "report.txt", table);
  write_file_atomic(dir / "report.json", report_json(report, {{"seed", cfg.get("seed")},
                                                              {"config_hash", cfg.hash()},
                                                              {"eval_split", which},
                                                              {"model", model_path(cfg).filename().string()}}));
}

void cmd_stream(const RunConfig& cfg, const std::string& input_wav, const std::string& out_csv, std::ostream& out) {
  apply_threads(cfg);
  Network<float> net = load_checkpoint(model_path(cfg));
  const auto channels = read_wav(input_wav);
  const Signal mono = average_channels(channels);
  auto preds = stream_infer(net, mono, cfg.pipeline(), cfg.get_double("window_s"), cfg.get_double("stride_s"));
  const std::size_t k = cfg.get_size("smooth_windows");
  if (k > 0) preds = majority_smooth(preds, k);
  std::vector<std::string> names = net.config().class_names;
  if (names.empty()) {
    for (std::size_t c = 0; c < net.config().num_classes; ++c) names.push_back(std::to_string(c));
  }
  write_file_atomic(out_csv, stream_csv(preds, names));
  out << "wrote " << preds.size() << " window predictions to " << out_csv << "\n";
}

void cmd_export(const RunConfig& cfg, const std::string& clip, const std::string& out_path, std::ostream& out) {
  std::string ext = fs::path(out_path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext != ".png" && ext != ".csv") throw UsageError("export: output must end in .png or .csv");
  const TFDImage img = clip_to_image(read_wav(clip), cfg.pipeline());
  if (ext == ".png") {
    write_png(img, out_path);
  } else {
    write_tfd_csv(img, out_path);
  }
  out << "wrote " << img.rows << "x" << img.cols << " image to " << out_path << "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo Wigner-Ville audio classification toolkit", "wvdnet"};
  app.require_subcommand(1);

  std::string config_file, seed, out_dir;
  std::vector<std::string> sets;
  std::string dataset, source, store, model, input, clip, split;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "key = value config file");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out_dir, "output directory (file for stream/export)");
    sub->add_option("--set", sets, "override a config key, key=value (repeatable)");
  };
  auto* synth = app.add_subcommand("synth", "generate a labelled synthetic WAV dataset");
  common(synth);
  auto* pre = app.add_subcommand("preprocess", "turn a dataset into a store of TFD images");
  common(pre);
  pre->add_option("--dataset", dataset, "dataset root");
  pre->add_option("--source", source, "urbansound8k | esc50 | folder_per_class");
  auto* tr = app.add_subcommand("train", "train the classifier on a store");
  common(tr);
  tr->add_option("--store", store, "preprocessed store directory");
  auto* ev = app.add_subcommand("evaluate", "evaluate a checkpoint on a store split");
  common(ev);
  ev->add_option("--store", store, "preprocessed store directory");
  ev->add_option("--model", model, "checkpoint file");
  ev->add_option("--split", split, "test | train | all");
  auto* st = app.add_subcommand("stream", "sliding-window inference over a long recording");
  common(st);
  st->add_option("--model", model, "checkpoint file");
  st->add_option("--input", input, "input WAV")->required();
  auto* ex = app.add_subcommand("export", "write one clip's TFD image as PNG or CSV");
  common(ex);
  ex->add_option("--clip", clip, "input WAV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& s : sets) cfg.set_assignment(s);
    if (!seed.empty()) cfg.set("seed", seed);
    if (!dataset.empty()) cfg.set("dataset_root", dataset);
    if (!source.empty()) cfg.set("source", source);
    if (!store.empty()) cfg.set("store_dir", store);
    if (!model.empty()) cfg.set("model", model);
    if (!split.empty()) cfg.set("eval_split", split);

    if (synth->parsed()) {
      if (!out_dir.empty()) cfg.set("out", out_dir);
      cmd_synth(cfg, out);
    } else if (pre->parsed()) {
      if (!out_dir.empty()) cfg.set("store_dir", out_dir);
      cmd_preprocess(cfg, out);
    } else if (tr->parsed()) {
      if (!out_dir.empty()) cfg.set("out", out_dir);
      cmd_train(cfg, out, err);
    } else if (ev->parsed()) {
      if (!out_dir.empty()) cfg.set("out", out_dir);
      cmd_evaluate(cfg, out);
    } else if (st->parsed()) {
      if (out_dir.empty()) throw UsageError("stream: --out <file.csv> is required");
      cmd_stream(cfg, input, out_dir, out);
    } else if (ex->parsed()) {
      if (out_dir.empty()) throw UsageError("export: --out <file.png|file.csv> is required");
      cmd_export(cfg, clip, out_dir, out);
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace wvdnet
