#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

#include "airwrite/detail/endian.hpp"
#include "airwrite/detail/rng.hpp"
#include "airwrite/errors.hpp"
#include "airwrite/matrix.hpp"

namespace airwrite {

inline constexpr int kNumClasses = 26;

inline char letter_of(int class_index) { return static_cast<char>('A' + class_index); }
inline int class_of(char letter) { return letter - 'A'; }
inline bool is_letter(char c) { return c >= 'A' && c <= 'Z'; }

struct TrialRecord {
  std::string subject_id;
  char letter = 'A';
  int repetition = 0;
  double sample_rate_hz = 2000.0;
  int n_channels = 5;
  std::string data_path;

  int label() const { return class_of(letter); }
  auto key() const { return std::tie(subject_id, letter, repetition); }

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct Trial {
  TrialRecord record;
  Matrix<double> samples;  // n_channels x n_samples

  std::size_t n_channels() const { return samples.rows(); }
  std::size_t n_samples() const { return samples.cols(); }
  double duration_s() const {
    return static_cast<double>(n_samples()) / record.sample_rate_hz;
  }
};

struct DatasetManifest {
  int version = 1;
  int n_repetitions = 10;
  std::vector<std::string> subjects;
  std::vector<TrialRecord> trials;
  std::filesystem::path root;

  std::filesystem::path path_of(const TrialRecord& r) const { return root / r.data_path; }
};

struct DurationStats {
  double mean_s = 0.0;
  double median_s = 0.0;
  double p999_s = 0.0;
  std::vector<double> bin_edges;  // 51 edges for 50 bins
  std::vector<std::size_t> counts;
};

struct SyntheticSpec {
  int n_subjects = 10;
  int n_repetitions = 2;
  int n_channels = 5;
  double sample_rate_hz = 2000.0;
  double min_duration_s = 1.5;
  double max_duration_s = 3.5;
  double class_separability = 1.0;
  std::uint64_t seed = 7;

  void validate() const {
    if (n_subjects < 1 || n_repetitions < 1 || n_channels < 1 || n_channels > 65535) {
      throw Error(ErrorCode::InvalidArgument, "synthetic counts must be positive");
    }
    if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample rate must be > 0");
    if (!(min_duration_s > 0.0) || !(max_duration_s >= min_duration_s)) {
      throw Error(ErrorCode::InvalidArgument, "duration range must satisfy 0 < min <= max");
    }
    if (!(class_separability >= 0.0 && class_separability <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "class separability must lie in [0, 1]");
    }
  }
};

// ---------------------------------------------------------------------------
// Manifest

inline void validate_manifest(const DatasetManifest& m) {
  if (m.n_repetitions < 1) throw Error(ErrorCode::SchemaViolation, "n_repetitions must be >= 1");
  std::set<std::string> subjects;
  for (const auto& s : m.subjects) {
    if (s.empty()) throw Error(ErrorCode::SchemaViolation, "empty subject id");
    if (!subjects.insert(s).second) throw Error(ErrorCode::SchemaViolation, "duplicate subject " + s);
  }
  std::set<std::tuple<std::string, char, int>> seen;
  for (const auto& t : m.trials) {
    const std::string where = t.subject_id + "/" + std::string(1, t.letter) + "/" +
                              std::to_string(t.repetition);
    if (!subjects.count(t.subject_id)) {
      throw Error(ErrorCode::SchemaViolation, "trial " + where + " names unknown subject");
    }
    if (!is_letter(t.letter)) throw Error(ErrorCode::SchemaViolation, "bad letter in " + where);
    if (t.repetition < 0 || t.repetition >= m.n_repetitions) {
      throw Error(ErrorCode::SchemaViolation, "repetition out of range in " + where);
    }
    if (!(t.sample_rate_hz > 0.0) || !std::isfinite(t.sample_rate_hz)) {
      throw Error(ErrorCode::SchemaViolation, "non-positive sample rate in " + where);
    }
    if (t.n_channels < 1 || t.n_channels > 65535) {
      throw Error(ErrorCode::SchemaViolation, "bad channel count in " + where);
    }
    if (t.data_path.empty()) throw Error(ErrorCode::SchemaViolation, "empty data_path in " + where);
    if (!seen.emplace(t.subject_id, t.letter, t.repetition).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate trial " + where);
    }
  }
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m, const std::string& root_text = ".") {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : m.trials) {
    trials.push_back({{"subject_id", t.subject_id},
                      {"letter", std::string(1, t.letter)},
                      {"repetition", t.repetition},
                      {"sample_rate_hz", t.sample_rate_hz},
                      {"n_channels", t.n_channels},
                      {"data_path", t.data_path}});
  }
  return {{"version", m.version},
          {"root", root_text},
          {"n_repetitions", m.n_repetitions},
          {"subjects", m.subjects},
          {"trials", std::move(trials)}};
}

// Parses and validates without touching the data files. `base` resolves a
// relative root.
inline DatasetManifest manifest_from_json(const nlohmann::json& j,
                                          const std::filesystem::path& base) {
  DatasetManifest m;
  try {
    m.version = j.at("version").get<int>();
    m.n_repetitions = j.value("n_repetitions", 10);
    const auto root = std::filesystem::path(j.at("root").get<std::string>());
    m.root = root.is_absolute() ? root : base / root;
    m.subjects = j.at("subjects").get<std::vector<std::string>>();
    for (const auto& jt : j.at("trials")) {
      TrialRecord r;
      r.subject_id = jt.at("subject_id").get<std::string>();
      const auto letter = jt.at("letter").get<std::string>();
      if (letter.size() != 1) throw Error(ErrorCode::SchemaViolation, "letter must be one character");
      r.letter = letter[0];
      r.repetition = jt.at("repetition").get<int>();
      r.sample_rate_hz = jt.at("sample_rate_hz").get<double>();
      r.n_channels = jt.at("n_channels").get<int>();
      r.data_path = jt.at("data_path").get<std::string>();
      m.trials.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (m.version != 1) throw Error(ErrorCode::SchemaViolation, "unsupported manifest version");
  validate_manifest(m);
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  auto m = manifest_from_json(j, path.parent_path());
  for (const auto& t : m.trials) {
    if (!std::filesystem::exists(m.path_of(t))) {
      throw Error(ErrorCode::MissingFile, "missing trial file " + m.path_of(t).string());
    }
  }
  return m;
}

inline void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << manifest_to_json(m).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Trial files: "MYOS", u16 version, u16 channels, u64 samples, f64 rate, then
// channel-major f32 samples, all little-endian.

inline constexpr std::array<char, 4> kTrialMagic{'M', 'Y', 'O', 'S'};
inline constexpr std::uint16_t kTrialFormatVersion = 1;
inline constexpr std::size_t kTrialHeaderBytes = 4 + 2 + 2 + 8 + 8;

struct TrialFileHeader {
  std::uint16_t version = kTrialFormatVersion;
  std::uint16_t n_channels = 0;
  std::uint64_t n_samples = 0;
  double sample_rate_hz = 0.0;
};

inline void write_trial_file(const std::filesystem::path& path, const Trial& trial) {
  const std::size_t n = trial.samples.size();
  std::vector<std::byte> buf(kTrialHeaderBytes + 4 * n);
  std::memcpy(buf.data(), kTrialMagic.data(), 4);
  detail::store_le<std::uint16_t>(buf.data() + 4, kTrialFormatVersion);
  detail::store_le<std::uint16_t>(buf.data() + 6, static_cast<std::uint16_t>(trial.n_channels()));
  detail::store_le<std::uint64_t>(buf.data() + 8, trial.n_samples());
  detail::store_le<double>(buf.data() + 16, trial.record.sample_rate_hz);
  const auto flat = trial.samples.flat();
  for (std::size_t i = 0; i < n; ++i) {
    detail::store_le<float>(buf.data() + kTrialHeaderBytes + 4 * i, static_cast<float>(flat[i]));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  std::vector<std::byte> buf(size);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  if (!in) throw Error(ErrorCode::IoError, "read failed for " + path.string());
  return buf;
}

inline TrialFileHeader parse_trial_header(std::span<const std::byte> bytes,
                                          const std::string& name) {
  if (bytes.size() < kTrialHeaderBytes) throw Error(ErrorCode::CorruptFile, name + ": short header");
  if (std::memcmp(bytes.data(), kTrialMagic.data(), 4) != 0) {
    throw Error(ErrorCode::CorruptFile, name + ": bad magic");
  }
  TrialFileHeader h;
  h.version = detail::load_le<std::uint16_t>(bytes.data() + 4);
  h.n_channels = detail::load_le<std::uint16_t>(bytes.data() + 6);
  h.n_samples = detail::load_le<std::uint64_t>(bytes.data() + 8);
  h.sample_rate_hz = detail::load_le<double>(bytes.data() + 16);
  if (h.version != kTrialFormatVersion) throw Error(ErrorCode::CorruptFile, name + ": unknown version");
  return h;
}

inline TrialFileHeader read_trial_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::array<std::byte, kTrialHeaderBytes> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": short header");
  }
  return parse_trial_header(buf, path.string());
}

inline Trial load_trial(const DatasetManifest& manifest, const TrialRecord& record) {
  const auto path = manifest.path_of(record);
  const auto bytes = read_file_bytes(path);
  const auto name = path.string();
  const auto h = parse_trial_header(bytes, name);
  if (h.n_channels != record.n_channels) {
    throw Error(ErrorCode::CorruptFile, name + ": channel count disagrees with manifest");
  }
  if (h.sample_rate_hz != record.sample_rate_hz) {
    throw Error(ErrorCode::CorruptFile, name + ": sample rate disagrees with manifest");
  }
  const std::uint64_t count = static_cast<std::uint64_t>(h.n_channels) * h.n_samples;
  if (h.n_samples > (bytes.size() / 4) || bytes.size() - kTrialHeaderBytes != 4 * count) {
    throw Error(ErrorCode::CorruptFile, name + ": payload length does not match header");
  }
  if (h.n_samples < 2) throw Error(ErrorCode::CorruptFile, name + ": fewer than 2 samples");
  Trial trial{record, Matrix<double>(h.n_channels, h.n_samples)};
  auto flat = trial.samples.flat();
  for (std::size_t i = 0; i < count; ++i) {
    const float v = detail::load_le<float>(bytes.data() + kTrialHeaderBytes + 4 * i);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteData, name + ": non-finite sample");
    flat[i] = v;
  }
  return trial;
}

// ---------------------------------------------------------------------------
// Duration statistics

inline DurationStats duration_stats(std::vector<double> durations) {
  if (durations.empty()) throw Error(ErrorCode::EmptyDataset, "no durations");
  std::sort(durations.begin(), durations.end());
  const std::size_t n = durations.size();
  DurationStats s;
  double sum = 0.0;
  for (double d : durations) sum += d;
  s.mean_s = sum / static_cast<double>(n);
  s.median_s = durations[(n - 1) / 2];
  const auto rank = static_cast<std::size_t>(std::ceil(0.999 * static_cast<double>(n)));
  s.p999_s = durations[std::max<std::size_t>(rank, 1) - 1];

  constexpr std::size_t kBins = 50;
  const double hi = durations.back();
  s.bin_edges.resize(kBins + 1);
  for (std::size_t i = 0; i <= kBins; ++i) s.bin_edges[i] = hi * static_cast<double>(i) / kBins;
  s.counts.assign(kBins, 0);
  for (double d : durations) {
    std::size_t b = hi > 0.0 ? static_cast<std::size_t>(d / hi * kBins) : 0;
    ++s.counts[std::min(b, kBins - 1)];
  }
  return s;
}

inline DurationStats dataset_stats(const DatasetManifest& manifest) {
  if (manifest.trials.empty()) throw Error(ErrorCode::EmptyDataset, "manifest lists no trials");
  std::vector<double> durations;
  durations.reserve(manifest.trials.size());
  for (const auto& t : manifest.trials) {
    const auto h = read_trial_header(manifest.path_of(t));
    durations.push_back(static_cast<double>(h.n_samples) / h.sample_rate_hz);
  }
  return duration_stats(std::move(durations));
}

// ---------------------------------------------------------------------------
// Synthetic corpus
//
// Each (class, channel) owns a burst envelope built from three Gaussian bumps
// on normalized writing time; trials are white noise modulated by that
// envelope, so class identity lives only in the amplitude profile.

namespace detail {

struct Bump {
  double center = 0.5;
  double width = 0.1;
  double height = 1.0;
};

using BurstTemplate = std::array<Bump, 3>;

inline BurstTemplate draw_template(Rng& rng) {
  BurstTemplate t;
  for (auto& b : t) {
    b.center = rng.uniform(0.1, 0.9);
    b.width = rng.uniform(0.04, 0.12);
    b.height = rng.uniform(0.3, 1.0);
  }
  return t;
}

inline double eval_template(const BurstTemplate& t, double r) {
  double v = 0.0;
  for (const auto& b : t) {
    const double z = (r - b.center) / b.width;
    v += b.height * std::exp(-0.5 * z * z);
  }
  return v;
}

struct SyntheticTemplates {
  std::vector<BurstTemplate> common;                 // per channel
  std::vector<std::vector<BurstTemplate>> specific;  // [class][channel]
};

inline SyntheticTemplates make_templates(const SyntheticSpec& spec) {
  Rng rng(mix_seed(spec.seed, 0xC1A55));
  SyntheticTemplates t;
  for (int ch = 0; ch < spec.n_channels; ++ch) t.common.push_back(draw_template(rng));
  t.specific.resize(kNumClasses);
  for (int c = 0; c < kNumClasses; ++c) {
    for (int ch = 0; ch < spec.n_channels; ++ch) t.specific[c].push_back(draw_template(rng));
  }
  return t;
}

inline std::string subject_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "S%02d", index + 1);
  return buf;
}

}  // namespace detail

inline Trial synthesize_trial(const SyntheticSpec& spec, const detail::SyntheticTemplates& templates,
                              int subject, int class_index, int repetition) {
  using detail::mix_seed;
  detail::Rng subject_rng(mix_seed(spec.seed, 1000 + static_cast<std::uint64_t>(subject)));
  std::vector<double> gains(spec.n_channels);
  for (auto& g : gains) g = std::exp(0.3 * subject_rng.normal());

  detail::Rng rng(mix_seed(mix_seed(spec.seed, 1000 + static_cast<std::uint64_t>(subject)),
                           static_cast<std::uint64_t>(class_index * 1000 + repetition)));
  const double duration = rng.uniform(spec.min_duration_s, spec.max_duration_s);
  const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(duration * spec.sample_rate_hz)));
  const double jitter = 0.02 * rng.normal();
  const double s = spec.class_separability;

  TrialRecord rec;
  rec.subject_id = detail::subject_name(subject);
  rec.letter = letter_of(class_index);
  rec.repetition = repetition;
  rec.sample_rate_hz = spec.sample_rate_hz;
  rec.n_channels = spec.n_channels;
  char path[64];
  std::snprintf(path, sizeof path, "%s/%s_%c_%d.myos", rec.subject_id.c_str(),
                rec.subject_id.c_str(), rec.letter, repetition);
  rec.data_path = path;

  Trial trial{rec, Matrix<double>(spec.n_channels, n)};
  for (int ch = 0; ch < spec.n_channels; ++ch) {
    const auto& common = templates.common[ch];
    const auto& own = templates.specific[class_index][ch];
    auto row = trial.samples.row(ch);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = static_cast<double>(i) / static_cast<double>(n - 1) - jitter;
      const double env = (1.0 - s) * detail::eval_template(common, r) +
                         s * detail::eval_template(own, r) + 0.05;
      row[i] = static_cast<float>(gains[ch] * env * rng.normal());
    }
  }
  return trial;
}

inline Trial synthesize_trial(const SyntheticSpec& spec, int subject, int class_index, int repetition) {
  return synthesize_trial(spec, detail::make_templates(spec), subject, class_index, repetition);
}

// Writes manifest.json plus one trial file per (subject, letter, repetition)
// under `out_dir`.
inline DatasetManifest generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  const auto templates = detail::make_templates(spec);
  DatasetManifest m;
  m.n_repetitions = spec.n_repetitions;
  m.root = out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  for (int subj = 0; subj < spec.n_subjects; ++subj) {
    m.subjects.push_back(detail::subject_name(subj));
    std::filesystem::create_directories(out_dir / m.subjects.back(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create subject directory: " + ec.message());
    for (int c = 0; c < kNumClasses; ++c) {
      for (int rep = 0; rep < spec.n_repetitions; ++rep) {
        auto trial = synthesize_trial(spec, templates, subj, c, rep);
        write_trial_file(out_dir / trial.record.data_path, trial);
        m.trials.push_back(std::move(trial.record));
      }
    }
  }
  save_manifest(m, out_dir / "manifest.json");
  return m;
}

}  // namespace airwrite
