#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace airwrite {

enum class ErrorCode {
  // data errors
  MissingFile,
  SchemaViolation,
  ParseError,
  CorruptFile,
  NonFiniteData,
  EmptyDataset,
  IoError,
  BadMagic,
  TruncatedPayload,
  MissingTensors,
  PartialFailure,
  // numeric / precondition errors
  DegenerateSignal,
  OutOfDomain,
  InsufficientPoints,
  SignalTooShort,
  TooFewSubjects,
  IncompatibleRepetitionCount,
  DegenerateLabels,
  NonFiniteLoss,
  DimensionMismatch,
  LengthMismatch,
  NoErrors,
  DegenerateGroups,
  ZeroVariance,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::MissingTensors: return "MissingTensors";
    case ErrorCode::PartialFailure: return "PartialFailure";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::TooFewSubjects: return "TooFewSubjects";
    case ErrorCode::IncompatibleRepetitionCount: return "IncompatibleRepetitionCount";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoErrors: return "NoErrors";
    case ErrorCode::DegenerateGroups: return "DegenerateGroups";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// Data errors come from the corpus or files on disk; everything else is a
// numeric or precondition failure. The CLI maps these to exit codes 2 and 3.
constexpr bool is_data_error(ErrorCode code) {
  // A dataset that cannot satisfy the requested split or holds too few
  // classes is a property of the data, not a numeric failure.
  return code <= ErrorCode::PartialFailure || code == ErrorCode::TooFewSubjects ||
         code == ErrorCode::IncompatibleRepetitionCount || code == ErrorCode::DegenerateLabels ||
         code == ErrorCode::SignalTooShort || code == ErrorCode::DegenerateSignal;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace airwrite
