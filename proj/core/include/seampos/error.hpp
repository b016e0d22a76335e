#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seampos {

enum class ErrorCode {
  // core schema
  UnparseableTimestamp,
  NegativeTimestamp,
  UnknownUnit,
  UnknownField,
  InvalidRecord,
  // jsonpath
  PathSyntax,
  SetOnWildcard,
  TypeConflict,
  // standardizer
  BackendUnavailable,
  InvalidBackendConfig,
  // trgm
  UnmatchedLeaf,
  UnsupportedOutputShape,
  InvalidScript,
  // fusion
  NonUnitQuaternion,
  NonMonotonicTime,
  GapTooLarge,
  SingularInnovation,
  EmptyStream,
  NoPositionSensor,
  // ingest
  ChecksumMismatch,
  UnsupportedSentence,
  MalformedField,
  MalformedLogLine,
  QueueFull,
  // evaluate
  InvalidPath,
  EmptySeries,
  // configuration
  InvalidConfig,
  MalformedDocument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace seampos
