#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "airwrite/detail/rng.hpp"
#include "airwrite/errors.hpp"
#include "airwrite/trial_store.hpp"

namespace airwrite {

enum class Scheme { UserIndependent, UserDependent };

inline std::string_view to_string(Scheme s) {
  return s == Scheme::UserIndependent ? "user-independent" : "user-dependent";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "user-independent" || s == "independent" || s == "ui") return Scheme::UserIndependent;
  if (s == "user-dependent" || s == "dependent" || s == "ud") return Scheme::UserDependent;
  throw Error(ErrorCode::InvalidArgument, "unknown validation scheme '" + std::string(s) + "'");
}

using TrialKey = std::tuple<std::string, char, int>;

inline TrialKey key_of(const TrialRecord& r) { return {r.subject_id, r.letter, r.repetition}; }

struct SplitAssignment {
  Scheme scheme = Scheme::UserIndependent;
  int n_folds = 5;
  std::uint64_t seed = 0;
  std::map<TrialKey, int> fold_of_trial;

  int fold_of(const TrialRecord& r) const {
    const auto it = fold_of_trial.find(key_of(r));
    if (it == fold_of_trial.end()) {
      throw Error(ErrorCode::SchemaViolation, "trial " + r.subject_id + "/" + r.letter +
                                                  "/" + std::to_string(r.repetition) +
                                                  " has no fold assignment");
    }
    return it->second;
  }
};

// UserIndependent: subjects are shuffled by `seed` and dealt round-robin, so
// fold sizes differ by at most one subject. UserDependent: repetition indices
// are cut into n_folds consecutive blocks ((0,1), (2,3), ... for 10 over 5),
// independent of the seed.
inline SplitAssignment make_folds(const DatasetManifest& manifest, Scheme scheme,
                                  std::uint64_t seed, int n_folds = 5) {
  if (n_folds < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 folds");
  SplitAssignment split{scheme, n_folds, seed, {}};
  if (scheme == Scheme::UserIndependent) {
    if (manifest.subjects.size() < static_cast<std::size_t>(n_folds)) {
      throw Error(ErrorCode::TooFewSubjects, std::to_string(manifest.subjects.size()) +
                                                 " subjects cannot fill " + std::to_string(n_folds) +
                                                 " folds");
    }
    std::vector<std::string> order = manifest.subjects;
    std::sort(order.begin(), order.end());
    detail::Rng rng(detail::mix_seed(seed, 0x5EB7));
    rng.shuffle(std::span<std::string>(order));
    std::map<std::string, int> subject_fold;
    for (std::size_t i = 0; i < order.size(); ++i) {
      subject_fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(n_folds));
    }
    for (const auto& t : manifest.trials) split.fold_of_trial[key_of(t)] = subject_fold.at(t.subject_id);
  } else {
    const int reps = manifest.n_repetitions;
    if (reps % n_folds != 0) {
      throw Error(ErrorCode::IncompatibleRepetitionCount,
                  std::to_string(reps) + " repetitions do not divide into " +
                      std::to_string(n_folds) + " folds");
    }
    const int per_fold = reps / n_folds;
    for (const auto& t : manifest.trials) split.fold_of_trial[key_of(t)] = t.repetition / per_fold;
  }
  return split;
}

// Tab-separated: header line, then subject_id, letter, repetition, fold.
inline void write_fold_table(const SplitAssignment& split, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "# scheme=" << to_string(split.scheme) << " n_folds=" << split.n_folds
      << " seed=" << split.seed << '\n';
  out << "subject_id\tletter\trepetition\tfold\n";
  for (const auto& [key, fold] : split.fold_of_trial) {
    out << std::get<0>(key) << '\t' << std::get<1>(key) << '\t' << std::get<2>(key) << '\t'
        << fold << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline SplitAssignment read_fold_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  SplitAssignment split;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      std::istringstream meta(line.substr(2));
      std::string tok;
      while (meta >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const auto k = tok.substr(0, eq);
        const auto v = tok.substr(eq + 1);
        if (k == "scheme") split.scheme = parse_scheme(v);
        if (k == "n_folds") split.n_folds = std::stoi(v);
        if (k == "seed") split.seed = std::stoull(v);
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string subject, letter;
    int rep = 0, fold = 0;
    if (!(row >> subject >> letter >> rep >> fold) || letter.size() != 1) {
      throw Error(ErrorCode::ParseError, "bad fold table row: " + line);
    }
    split.fold_of_trial[{subject, letter[0], rep}] = fold;
  }
  return split;
}

}  // namespace airwrite
