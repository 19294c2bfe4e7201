// airwrite: command-line driver for the sEMG airwriting pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "airwrite/airwrite.hpp"

namespace fs = std::filesystem;
using namespace airwrite;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 0;
  unsigned threads = 0;

  // synth
  fs::path out;
  SyntheticSpec synth;

  // dataset / split
  fs::path manifest;
  std::string scheme = "user-dependent";
  int folds = 5;

  // features
  std::string feature;
  std::string tf;
  double length_s = 4.0;
  std::string interp = "cubic";
  double window_ms = 125.0;
  bool no_zero_mean_var = false;
  double stft_window_ms = 100.0;
  std::size_t cwt_scales = 60;
  double cwt_omega0 = 6.0;
  std::size_t cwt_decimate = 100;

  // training / evaluation
  std::vector<fs::path> runs;
  int fold = 0;
  TrainConfig train;
  fs::path report_in;
};

void add_train_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--lr", o.train.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch-size", o.train.batch_size, "mini-batch size")->capture_default_str();
  cmd->add_option("--patience", o.train.patience, "early-stopping patience in epochs")->capture_default_str();
  cmd->add_option("--max-epochs", o.train.max_epochs, "epoch limit")->capture_default_str();
  cmd->add_option("--val-fraction", o.train.val_fraction, "held-out validation share")->capture_default_str();
}

RunConfig make_run_config(const Options& o, CLI::App* extract) {
  RunConfig cfg;
  cfg.manifest_path = o.manifest;
  cfg.out_dir = o.out;
  cfg.scheme = parse_scheme(o.scheme);
  cfg.n_folds = o.folds;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.resample = {o.length_s, parse_interp(o.interp)};

  const bool envelope_flags = extract->count("--feature") || extract->count("--window-ms") ||
                              extract->count("--no-zero-mean-var");
  const bool tf_flags = extract->count("--stft-window-ms") || extract->count("--cwt-scales") ||
                        extract->count("--cwt-omega0") || extract->count("--cwt-decimate");
  if (!o.tf.empty()) {
    if (envelope_flags) throw UsageError("--tf cannot be combined with envelope flags");
    if (o.tf == "stft") {
      if (extract->count("--cwt-scales") || extract->count("--cwt-omega0") || extract->count("--cwt-decimate")) {
        throw UsageError("CWT flags given with --tf stft");
      }
      cfg.feature = FeatureKind::Stft;
    } else {
      if (extract->count("--stft-window-ms")) throw UsageError("--stft-window-ms given with --tf cwt");
      cfg.feature = FeatureKind::Cwt;
    }
  } else {
    if (tf_flags) throw UsageError("time-frequency flags require --tf");
    cfg.feature = FeatureKind::Envelope;
    cfg.envelope.kind = parse_envelope_kind(o.feature.empty() ? "mav" : o.feature);
    cfg.envelope.variance_zero_mean = !o.no_zero_mean_var;
  }
  cfg.window_ms = o.window_ms;
  cfg.stft_window_ms = o.stft_window_ms;
  cfg.cwt.n_scales = o.cwt_scales;
  cfg.cwt.omega0 = o.cwt_omega0;
  cfg.cwt.decimation = o.cwt_decimate;
  cfg.train = o.train;
  cfg.train.seed = o.seed;
  return cfg;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << j.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

int cmd_synth(const Options& o) {
  SyntheticSpec spec = o.synth;
  spec.seed = o.seed;
  const auto m = generate_synthetic(spec, o.out);
  std::printf("wrote %zu trials for %zu subjects to %s\n", m.trials.size(), m.subjects.size(),
              (o.out / "manifest.json").string().c_str());
  return 0;
}

int cmd_stats(const Options& o) {
  const auto m = load_manifest(o.manifest);
  const auto s = dataset_stats(m);
  std::printf("trials\t%zu\nmean_s\t%.6f\nmedian_s\t%.6f\np99.9_s\t%.6f\n", m.trials.size(), s.mean_s,
              s.median_s, s.p999_s);
  std::printf("\nbin_lo_s\tbin_hi_s\tcount\n");
  for (std::size_t i = 0; i < s.counts.size(); ++i) {
    std::printf("%.4f\t%.4f\t%zu\n", s.bin_edges[i], s.bin_edges[i + 1], s.counts[i]);
  }
  return 0;
}

int cmd_split(const Options& o) {
  const auto m = load_manifest(o.manifest);
  const auto split = make_folds(m, parse_scheme(o.scheme), o.seed, o.folds);
  write_fold_table(split, o.out);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(split.n_folds), 0);
  for (const auto& [key, f] : split.fold_of_trial) ++sizes[static_cast<std::size_t>(f)];
  for (std::size_t f = 0; f < sizes.size(); ++f) std::printf("fold %zu\t%zu trials\n", f, sizes[f]);
  return 0;
}

int cmd_extract(const Options& o, CLI::App* sub) {
  const auto cfg = make_run_config(o, sub);
  const auto res = run_extract(cfg);
  std::string dims;
  for (auto d : res.features.dims) dims += (dims.empty() ? "" : " x ") + std::to_string(d);
  std::printf("features %s -> %s\n", dims.c_str(), (cfg.out_dir / "features.myot").string().c_str());
  return 0;
}

int cmd_train(const Options& o) {
  if (o.runs.size() != 1) throw UsageError("train takes exactly one --run");
  const auto ds = load_extract(o.runs.front());
  if (o.fold < 0 || o.fold >= ds.n_folds) throw UsageError("--fold out of range");
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < ds.fold.size(); ++i) (ds.fold[i] == o.fold ? test_rows : train_rows).push_back(i);
  std::vector<int> y_train, y_test;
  for (auto r : train_rows) y_train.push_back(ds.y[r]);
  for (auto r : test_rows) y_test.push_back(ds.y[r]);
  TrainConfig cfg = o.train;
  cfg.seed = detail::mix_seed(o.seed, static_cast<std::uint64_t>(o.fold));
  const auto result = train_baseline(select_rows(ds.x, train_rows), y_train, cfg);
  const auto pred = predict(result.model, select_rows(ds.x, test_rows));
  const double acc = confusion_matrix(y_test, pred).accuracy();

  fs::create_directories(o.out);
  const auto& w = result.model.weights;
  write_tensor(o.out / "weights.myot",
               Tensor{{w.rows(), w.cols()}, std::vector<float>(w.data().begin(), w.data().end())});
  write_tensor(o.out / "bias.myot", Tensor{{result.model.bias.size()},
                                           std::vector<float>(result.model.bias.begin(), result.model.bias.end())});
  write_json(o.out / "model.json", {{"fold", o.fold},
                                    {"train_parameters", train_parameters(cfg)},
                                    {"extract_parameters", ds.provenance.value("parameters", nlohmann::json::object())},
                                    {"epochs_run", result.history.val_accuracy.size()},
                                    {"best_epoch", result.history.best_epoch},
                                    {"test_accuracy", acc}});
  std::printf("fold %d: %zu epochs, best epoch %d, test accuracy %.4f\n", o.fold,
              result.history.val_accuracy.size(), result.history.best_epoch, acc);
  return 0;
}

void print_report(const nlohmann::json& report) {
  for (const auto& run : report.at("runs")) {
    std::printf("== %s\n", run.at("name").get<std::string>().c_str());
    std::printf("fold accuracy:");
    for (double a : run.at("fold_accuracy")) std::printf(" %.4f", a);
    std::printf("\nmean ± std (population): %s\n", run.at("summary").get<std::string>().c_str());
    std::printf("\nconfusion matrix (rows true, columns predicted)\n   ");
    for (int c = 0; c < kNumClasses; ++c) std::printf(" %4c", letter_of(c));
    std::printf("\n");
    const auto& cm = run.at("confusion_matrix");
    for (std::size_t i = 0; i < cm.size(); ++i) {
      std::printf("  %c", letter_of(static_cast<int>(i)));
      for (const auto& v : cm[i]) std::printf(" %4zu", v.get<std::size_t>());
      std::printf("\n");
    }
    std::printf("\npair\t%% of total error\n");
    for (const auto& p : run.at("top_confusable_pairs")) {
      std::printf("%s\t%.2f%%\n", p.at("pair").get<std::string>().c_str(), p.at("percent_of_error").get<double>());
    }
    std::printf("\n");
  }
  if (report.contains("comparisons")) {
    const auto& c = report.at("comparisons");
    const auto& a = c.at("anova");
    if (a.contains("error")) {
      std::printf("ANOVA: %s\n", a.at("error").get<std::string>().c_str());
    } else {
      std::printf("ANOVA: F(%g, %g) = %.4f, p = %.4g\n", a.at("dof1").get<double>(), a.at("dof2").get<double>(),
                  a.at("statistic").get<double>(), a.at("p_value").get<double>());
    }
    std::printf("\na\tb\tt\tdof\tp (one-tailed)\n");
    for (const auto& t : c.at("t_tests")) {
      if (t.contains("error")) {
        std::printf("%s\t%s\t-\t-\t%s\n", t.at("a").get<std::string>().c_str(), t.at("b").get<std::string>().c_str(),
                    t.at("error").get<std::string>().c_str());
        continue;
      }
      std::printf("%s\t%s\t%.4f\t%g\t%.4f\n", t.at("a").get<std::string>().c_str(),
                  t.at("b").get<std::string>().c_str(), t.at("statistic").get<double>(),
                  t.at("dof1").get<double>(), t.at("p_value").get<double>());
    }
  }
}

int cmd_eval(const Options& o) {
  TrainConfig cfg = o.train;
  cfg.seed = o.seed;
  const auto report = run_eval(o.runs, cfg);
  write_json(o.out, report);
  for (const auto& run : report.at("runs")) {
    std::printf("%s\t%s\n", run.at("name").get<std::string>().c_str(), run.at("summary").get<std::string>().c_str());
  }
  return 0;
}

int cmd_report(const Options& o) {
  std::ifstream in(o.report_in);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + o.report_in.string());
  nlohmann::json report;
  try {
    in >> report;
    print_report(report);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return 0;
}

// Per-fold train/test tensors for the external deep-model trainer.
int cmd_export(const Options& o) {
  if (o.runs.size() != 1) throw UsageError("export takes exactly one --run");
  const auto dir = o.runs.front();
  const auto ds = load_extract(dir);
  const auto features = read_tensor(dir / "features.myot");
  std::vector<std::uint64_t> image_dims(features.dims.begin() + 1, features.dims.end());
  fs::create_directories(o.out);
  for (int f = 0; f < ds.n_folds; ++f) {
    for (const bool test : {false, true}) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < ds.fold.size(); ++i) {
        if ((ds.fold[i] == f) == test) rows.push_back(i);
      }
      Tensor x{{rows.size()}, {}};
      x.dims.insert(x.dims.end(), image_dims.begin(), image_dims.end());
      Tensor y{{rows.size()}, {}};
      for (auto r : rows) {
        const auto row = ds.x.row(r);
        for (double v : row) x.values.push_back(static_cast<float>(v));
        y.values.push_back(static_cast<float>(ds.y[r]));
      }
      const std::string side = test ? "test" : "train";
      write_tensor(o.out / ("fold" + std::to_string(f) + "_x_" + side + ".myot"), x);
      write_tensor(o.out / ("fold" + std::to_string(f) + "_y_" + side + ".myot"), y);
    }
  }
  fs::copy_file(dir / "folds.tsv", o.out / "folds.tsv", fs::copy_options::overwrite_existing);
  fs::copy_file(dir / "extract.json", o.out / "extract.json", fs::copy_options::overwrite_existing);
  std::printf("exported %d folds to %s\n", ds.n_folds, o.out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sEMG airwriting recognition pipeline"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "global random seed")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
  synth->add_option("--out", o.out, "output directory")->required();
  synth->add_option("--subjects", o.synth.n_subjects)->capture_default_str();
  synth->add_option("--reps", o.synth.n_repetitions)->capture_default_str();
  synth->add_option("--channels", o.synth.n_channels)->capture_default_str();
  synth->add_option("--fs", o.synth.sample_rate_hz, "sample rate in Hz")->capture_default_str();
  synth->add_option("--min-duration-s", o.synth.min_duration_s)->capture_default_str();
  synth->add_option("--max-duration-s", o.synth.max_duration_s)->capture_default_str();
  synth->add_option("--separability", o.synth.class_separability, "0 = identical classes, 1 = distinct")
      ->capture_default_str();

  auto* stats = app.add_subcommand("stats", "writing-duration statistics of a corpus");
  stats->add_option("--manifest", o.manifest)->required();

  auto* split = app.add_subcommand("split", "write the fold assignment table");
  split->add_option("--manifest", o.manifest)->required();
  split->add_option("--scheme", o.scheme, "user-dependent | user-independent")->capture_default_str();
  split->add_option("--folds", o.folds)->capture_default_str();
  split->add_option("--out", o.out, "output .tsv")->required();

  auto* extract = app.add_subcommand("extract", "resample, extract features, z-normalize, write tensors");
  extract->add_option("--manifest", o.manifest)->required();
  extract->add_option("--out", o.out, "output directory")->required();
  extract->add_option("--scheme", o.scheme, "user-dependent | user-independent")->capture_default_str();
  extract->add_option("--folds", o.folds)->capture_default_str();
  extract->add_option("--length-s", o.length_s, "fixed signal length L in seconds")->capture_default_str();
  extract->add_option("--interp", o.interp)
      ->check(CLI::IsMember({"nearest", "linear", "quadratic", "cubic"}))
      ->capture_default_str();
  extract->add_option("--feature", o.feature, "envelope feature")
      ->check(CLI::IsMember({"mav", "energy", "var", "rms", "tm3", "tm4", "tm5", "logd"}));
  extract->add_option("--window-ms", o.window_ms, "envelope window length")->capture_default_str();
  extract->add_flag("--no-zero-mean-var", o.no_zero_mean_var, "use the window mean in the variance envelope");
  extract->add_option("--tf", o.tf, "time-frequency image")->check(CLI::IsMember({"stft", "cwt"}));
  extract->add_option("--stft-window-ms", o.stft_window_ms)->capture_default_str();
  extract->add_option("--cwt-scales", o.cwt_scales)->capture_default_str();
  extract->add_option("--cwt-omega0", o.cwt_omega0)->capture_default_str();
  extract->add_option("--cwt-decimate", o.cwt_decimate)->capture_default_str();

  auto* train = app.add_subcommand("train", "train the baseline on one fold");
  train->add_option("--run", o.runs, "extract directory")->required();
  train->add_option("--fold", o.fold, "held-out fold")->capture_default_str();
  train->add_option("--out", o.out, "model output directory")->required();
  add_train_flags(train, o);

  auto* eval = app.add_subcommand("eval", "cross-validate the baseline over every fold");
  eval->add_option("--run", o.runs, "extract directory (repeat to compare features)")->required();
  eval->add_option("--out", o.out, "report .json")->required();
  add_train_flags(eval, o);

  auto* report = app.add_subcommand("report", "print a report as text tables");
  report->add_option("--in", o.report_in, "report .json")->required();

  auto* exp = app.add_subcommand("export", "write per-fold train/test tensors");
  exp->add_option("--run", o.runs, "extract directory")->required();
  exp->add_option("--out", o.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(o);
    if (*stats) return cmd_stats(o);
    if (*split) return cmd_split(o);
    if (*extract) return cmd_extract(o, extract);
    if (*train) return cmd_train(o);
    if (*eval) return cmd_eval(o);
    if (*report) return cmd_report(o);
    if (*exp) return cmd_export(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (e.code() == ErrorCode::InvalidArgument) return kExitUsage;
    return is_data_error(e.code()) ? kExitData : kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}
