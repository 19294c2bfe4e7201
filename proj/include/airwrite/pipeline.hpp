#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "airwrite/baseline.hpp"
#include "airwrite/errors.hpp"
#include "airwrite/features_tf.hpp"
#include "airwrite/features_time.hpp"
#include "airwrite/folds.hpp"
#include "airwrite/metrics.hpp"
#include "airwrite/resample.hpp"
#include "airwrite/stats.hpp"
#include "airwrite/tensor_io.hpp"
#include "airwrite/trial_store.hpp"

namespace airwrite {

enum class FeatureKind { Envelope, Stft, Cwt };

inline std::string_view to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::Envelope: return "envelope";
    case FeatureKind::Stft: return "stft";
    case FeatureKind::Cwt: return "cwt";
  }
  return "?";
}

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path out_dir;
  Scheme scheme = Scheme::UserDependent;
  int n_folds = 5;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency

  FeatureKind feature = FeatureKind::Envelope;
  ResampleSpec resample;
  EnvelopeOptions envelope;
  double window_ms = 125.0;
  double stft_window_ms = 100.0;
  CwtConfig cwt;
  TrainConfig train;
};

inline std::size_t ms_to_samples(double ms, double sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(ms * sample_rate_hz / 1000.0));
}

inline nlohmann::json extract_parameters(const RunConfig& cfg) {
  nlohmann::json j{{"scheme", to_string(cfg.scheme)},
                   {"n_folds", cfg.n_folds},
                   {"seed", cfg.seed},
                   {"feature", to_string(cfg.feature)},
                   {"length_s", cfg.resample.target_length_s},
                   {"interp", to_string(cfg.resample.method)},
                   {"pipeline", "resample -> feature -> per-channel z-normalization"}};
  switch (cfg.feature) {
    case FeatureKind::Envelope:
      j["envelope"] = to_string(cfg.envelope.kind);
      j["variance_zero_mean"] = cfg.envelope.variance_zero_mean;
      j["window_ms"] = cfg.window_ms;
      j["overlap"] = 0.5;
      break;
    case FeatureKind::Stft:
      j["stft_window_ms"] = cfg.stft_window_ms;
      j["window"] = "periodic hann, 50% overlap, n_fft = window, one-sided magnitude";
      break;
    case FeatureKind::Cwt:
      j["cwt_scales"] = cfg.cwt.n_scales;
      j["cwt_omega0"] = cfg.cwt.omega0;
      j["cwt_f_min_hz"] = cfg.cwt.f_min_hz;
      j["cwt_f_max_hz"] = cfg.cwt.f_max_hz;
      j["cwt_decimate"] = cfg.cwt.decimation;
      j["cwt_support_sigma"] = cfg.cwt.support_radius;
      break;
  }
  return j;
}

inline nlohmann::json train_parameters(const TrainConfig& t) {
  return {{"model", "multinomial logistic regression"},
          {"optimizer", "adam"},
          {"learning_rate", t.learning_rate},
          {"beta1", t.beta1},
          {"beta2", t.beta2},
          {"epsilon", t.epsilon},
          {"batch_size", t.batch_size},
          {"val_fraction", t.val_fraction},
          {"patience", t.patience},
          {"max_epochs", t.max_epochs},
          {"init_scale", t.init_scale},
          {"seed", t.seed}};
}

// Runs fn(i) for i in [0, n) on a pool of workers. Results must be written by
// index; the first failure (lowest index) is rethrown after all workers join.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Feature image for one trial: rows are channels, each row the flattened
// per-channel image (frames, or bins x frames), already z-normalized.
struct FeatureImage {
  Matrix<double> values;
  std::vector<std::uint64_t> channel_shape;
};

class FeatureExtractor {
 public:
  FeatureExtractor(const RunConfig& cfg, double sample_rate_hz) : cfg_(cfg), fs_(sample_rate_hz) {
    switch (cfg.feature) {
      case FeatureKind::Envelope:
        plan_ = WindowPlan{ms_to_samples(cfg.window_ms, fs_), 0.5};
        plan_.validate();
        break;
      case FeatureKind::Stft:
        stft_.emplace(StftConfig{ms_to_samples(cfg.stft_window_ms, fs_)});
        break;
      case FeatureKind::Cwt:
        cwt_.emplace(cfg.cwt, fs_);
        break;
    }
  }

  FeatureImage operator()(const Trial& trial) const {
    const auto fixed = fit_length(trial, cfg_.resample);
    FeatureImage img;
    switch (cfg_.feature) {
      case FeatureKind::Envelope: {
        img.values = compute_envelope(fixed, plan_, cfg_.envelope).values;
        img.channel_shape = {img.values.cols()};
        break;
      }
      case FeatureKind::Stft:
      case FeatureKind::Cwt: {
        std::vector<Matrix<double>> per_channel;
        for (std::size_t ch = 0; ch < fixed.n_channels(); ++ch) {
          per_channel.push_back(stft_ ? (*stft_)(fixed.samples.row(ch)) : (*cwt_)(fixed.samples.row(ch)));
        }
        const auto& first = per_channel.front();
        img.values = Matrix<double>(per_channel.size(), first.size());
        for (std::size_t ch = 0; ch < per_channel.size(); ++ch) {
          std::copy(per_channel[ch].flat().begin(), per_channel[ch].flat().end(), img.values.row(ch).begin());
        }
        img.channel_shape = {first.rows(), first.cols()};
        break;
      }
    }
    znorm_inplace(img.values);
    return img;
  }

 private:
  RunConfig cfg_;
  double fs_;
  WindowPlan plan_;
  std::optional<StftMagnitude> stft_;
  std::optional<CwtMagnitude> cwt_;
};

struct ExtractResult {
  Tensor features;  // trials x channels x (frames | bins x frames | scales x frames)
  Tensor labels;    // trials
  SplitAssignment split;
  std::vector<TrialRecord> trials;  // tensor row order
  nlohmann::json provenance;
};

inline ExtractResult extract_features(const DatasetManifest& manifest, const RunConfig& cfg) {
  if (manifest.trials.empty()) throw Error(ErrorCode::EmptyDataset, "manifest lists no trials");
  const double fs = manifest.trials.front().sample_rate_hz;
  const int n_ch = manifest.trials.front().n_channels;
  for (const auto& t : manifest.trials) {
    if (t.sample_rate_hz != fs || t.n_channels != n_ch) {
      throw Error(ErrorCode::SchemaViolation, "all trials must share one sample rate and channel count");
    }
  }
  ExtractResult res;
  res.split = make_folds(manifest, cfg.scheme, cfg.seed, cfg.n_folds);
  res.trials = manifest.trials;
  const FeatureExtractor extract(cfg, fs);

  const std::size_t n = manifest.trials.size();
  std::vector<std::optional<FeatureImage>> images(n);
  std::vector<std::string> failures(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    try {
      images[i] = extract(load_trial(manifest, manifest.trials[i]));
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  std::string report;
  std::size_t n_failed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i].empty()) continue;
    const auto& r = manifest.trials[i];
    report += "\n  " + r.subject_id + "/" + r.letter + "/" + std::to_string(r.repetition) + ": " + failures[i];
    ++n_failed;
  }
  if (n_failed) throw Error(ErrorCode::PartialFailure, std::to_string(n_failed) + " trial(s) failed:" + report);

  const auto& shape = images.front()->channel_shape;
  res.features.dims = {n, static_cast<std::uint64_t>(n_ch)};
  res.features.dims.insert(res.features.dims.end(), shape.begin(), shape.end());
  res.features.values.reserve(res.features.element_count());
  res.labels.dims = {n};
  for (std::size_t i = 0; i < n; ++i) {
    if (images[i]->channel_shape != shape) {
      throw Error(ErrorCode::DimensionMismatch, "feature images differ in shape between trials");
    }
    for (double v : images[i]->values.flat()) res.features.values.push_back(static_cast<float>(v));
    res.labels.values.push_back(static_cast<float>(manifest.trials[i].label()));
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : res.trials) rows.push_back({t.subject_id, std::string(1, t.letter), t.repetition});
  res.provenance = {{"parameters", extract_parameters(cfg)},
                    {"sample_rate_hz", fs},
                    {"n_channels", n_ch},
                    {"feature_dims", res.features.dims},
                    {"trials", std::move(rows)}};
  return res;
}

inline void save_extract(const ExtractResult& res, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_tensor(dir / "features.myot", res.features);
  write_tensor(dir / "labels.myot", res.labels);
  write_fold_table(res.split, dir / "folds.tsv");
  std::ofstream out(dir / "extract.json");
  out << res.provenance.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write extract.json");
}

inline ExtractResult run_extract(const RunConfig& cfg) {
  const auto manifest = load_manifest(cfg.manifest_path);
  auto res = extract_features(manifest, cfg);
  save_extract(res, cfg.out_dir);
  return res;
}

// Features flattened to one row per trial, plus labels and fold ids.
struct Dataset {
  Matrix<double> x;
  std::vector<int> y;
  std::vector<int> fold;
  int n_folds = 5;
  std::string name;
  nlohmann::json provenance;
};

inline Dataset load_extract(const std::filesystem::path& dir) {
  for (const char* f : {"features.myot", "labels.myot", "folds.tsv", "extract.json"}) {
    if (!std::filesystem::exists(dir / f)) {
      throw Error(ErrorCode::MissingTensors, (dir / f).string() + " not found; run extract first");
    }
  }
  const auto features = read_tensor(dir / "features.myot");
  const auto labels = read_tensor(dir / "labels.myot");
  const auto split = read_fold_table(dir / "folds.tsv");
  nlohmann::json prov;
  try {
    std::ifstream in(dir / "extract.json");
    in >> prov;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  const std::size_t n = features.dims.front();
  if (labels.dims.size() != 1 || labels.dims.front() != n) {
    throw Error(ErrorCode::DimensionMismatch, "labels tensor does not match features");
  }
  const std::size_t d = features.values.size() / n;
  Dataset ds;
  ds.x = Matrix<double>(n, d, std::vector<double>(features.values.begin(), features.values.end()));
  ds.y.reserve(n);
  for (float v : labels.values) ds.y.push_back(static_cast<int>(v));
  ds.n_folds = split.n_folds;
  ds.name = dir.filename().string();
  if (ds.name.empty()) ds.name = dir.parent_path().filename().string();
  const auto& rows = prov.at("trials");
  if (rows.size() != n) throw Error(ErrorCode::DimensionMismatch, "extract.json lists a different trial count");
  for (const auto& r : rows) {
    TrialRecord rec;
    rec.subject_id = r.at(0).get<std::string>();
    rec.letter = r.at(1).get<std::string>().at(0);
    rec.repetition = r.at(2).get<int>();
    ds.fold.push_back(split.fold_of(rec));
  }
  ds.provenance = std::move(prov);
  return ds;
}

inline Matrix<double> select_rows(const Matrix<double>& x, std::span<const std::size_t> rows) {
  Matrix<double> out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = x.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

struct FoldOutcome {
  std::vector<double> accuracy;  // per fold
  ConfusionMatrix confusion;     // summed over folds
};

// Trainer: (train features, train labels, fold) -> predictor, where
// predictor(test features) returns one class index per row.
template <typename Trainer>
FoldOutcome evaluate_folds(const Matrix<double>& x, std::span<const int> y, std::span<const int> fold,
                           int n_folds, Trainer&& trainer) {
  FoldOutcome out;
  for (int f = 0; f < n_folds; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
    if (test_rows.empty() || train_rows.empty()) {
      throw Error(ErrorCode::SchemaViolation, "fold " + std::to_string(f) + " has an empty train or test side");
    }
    std::vector<int> y_train, y_test;
    for (auto r : train_rows) y_train.push_back(y[r]);
    for (auto r : test_rows) y_test.push_back(y[r]);
    auto predictor = trainer(select_rows(x, train_rows), std::span<const int>(y_train), f);
    const std::vector<int> pred = predictor(select_rows(x, test_rows));
    const auto cm = confusion_matrix(y_test, pred);
    out.accuracy.push_back(cm.accuracy());
    out.confusion += cm;
  }
  return out;
}

inline auto baseline_trainer(const TrainConfig& base) {
  return [base](const Matrix<double>& x, std::span<const int> y, int fold) {
    TrainConfig cfg = base;
    cfg.seed = detail::mix_seed(base.seed, static_cast<std::uint64_t>(fold));
    auto model = train_baseline(x, y, cfg).model;
    return [model = std::move(model)](const Matrix<double>& test) { return predict(model, test); };
  };
}

inline nlohmann::json confusion_to_json(const ConfusionMatrix& cm) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cm.n_classes(); ++i) {
    rows.push_back(std::vector<std::size_t>(cm.counts.row(i).begin(), cm.counts.row(i).end()));
  }
  return rows;
}

inline nlohmann::json run_summary(const std::string& name, const FoldOutcome& outcome, const nlohmann::json& provenance) {
  const auto ms = mean_std(outcome.accuracy);
  nlohmann::json pairs = nlohmann::json::array();
  if (outcome.confusion.total() != outcome.confusion.trace()) {
    for (const auto& p : top_confusable_pairs(outcome.confusion, 5)) {
      pairs.push_back({{"pair", std::string{letter_of(p.first), ',', letter_of(p.second)}},
                       {"count", p.count},
                       {"percent_of_error", p.percent}});
    }
  }
  return {{"name", name},
          {"extract_parameters", provenance.value("parameters", nlohmann::json::object())},
          {"fold_accuracy", outcome.accuracy},
          {"mean_accuracy", ms.mean},
          {"std_accuracy", ms.std},
          {"summary", format_mean_std(ms)},
          {"confusion_matrix", confusion_to_json(outcome.confusion)},
          {"top_confusable_pairs", std::move(pairs)}};
}

// Cross-run comparisons over per-fold accuracies: one ANOVA across all runs
// and a paired one-tailed t-test for every pair of runs.
inline nlohmann::json compare_runs(const std::vector<std::string>& names,
                                   const std::vector<std::vector<double>>& accuracies) {
  nlohmann::json out = nlohmann::json::object();
  auto stat_json = [](const StatTestResult& r) {
    return nlohmann::json{{"statistic", r.statistic}, {"p_value", r.p_value}, {"dof1", r.dof1}, {"dof2", r.dof2}};
  };
  try {
    out["anova"] = stat_json(one_way_anova(accuracies));
  } catch (const Error& e) {
    out["anova"] = {{"error", e.what()}};
  }
  nlohmann::json tests = nlohmann::json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      nlohmann::json entry{{"a", names[i]}, {"b", names[j]}, {"paired", true}};
      try {
        entry.update(stat_json(t_test_one_tailed(accuracies[i], accuracies[j], true)));
      } catch (const Error& e) {
        entry["error"] = e.what();
      }
      tests.push_back(std::move(entry));
    }
  }
  out["t_tests"] = std::move(tests);
  return out;
}

inline nlohmann::json run_eval(const std::vector<std::filesystem::path>& runs, const TrainConfig& train) {
  if (runs.empty()) throw Error(ErrorCode::MissingTensors, "no extract directories given");
  nlohmann::json report{{"train_parameters", train_parameters(train)},
                        {"std_convention", "population standard deviation across folds"}};
  nlohmann::json run_reports = nlohmann::json::array();
  std::vector<std::string> names;
  std::vector<std::vector<double>> accuracies;
  for (const auto& dir : runs) {
    const auto ds = load_extract(dir);
    const auto outcome = evaluate_folds(ds.x, ds.y, ds.fold, ds.n_folds, baseline_trainer(train));
    std::string name = ds.name;
    for (int k = 2; std::find(names.begin(), names.end(), name) != names.end(); ++k) {
      name = ds.name + "#" + std::to_string(k);
    }
    names.push_back(name);
    accuracies.push_back(outcome.accuracy);
    run_reports.push_back(run_summary(name, outcome, ds.provenance));
  }
  report["runs"] = std::move(run_reports);
  if (runs.size() >= 2) report["comparisons"] = compare_runs(names, accuracies);
  return report;
}

}  // namespace airwrite
