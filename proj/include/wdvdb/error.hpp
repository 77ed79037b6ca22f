// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wdvdb {

enum class ErrorCode {
  // corpus
  MalformedRow,
  NonMonotoneId,
  DuplicateId,
  OverlappingIntervals,
  InvalidManifest,
  UnknownRevision,
  InvalidRollback,
  InvalidConfig,
  MissingLabel,
  // stream protocol
  ClientDisconnect,
  MalformedScore,
  ScoreOutOfRange,
  UnknownRevisionScored,
  Timeout,
  ConnectionRefused,
  ProtocolViolation,
  MalformedTrace,
  // features
  OutOfOrder,
  NotFrozenInTest,
  // learning
  EmptyCounts,
  SingleClass,
  EmptyData,
  ArityMismatch,
  UnknownSession,
  IdSetMismatch,
  VersionMismatch,
  CorruptFile,
  // evaluation
  NoPositives,
  EmptyResult,
  InvalidFilter,
  IoFailure,
  // cli
  Usage,
};

enum class ErrorCategory { Usage, Data, Protocol };

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotoneId: return "NonMonotoneId";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::OverlappingIntervals: return "OverlappingIntervals";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::UnknownRevision: return "UnknownRevision";
    case ErrorCode::InvalidRollback: return "InvalidRollback";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::ClientDisconnect: return "ClientDisconnect";
    case ErrorCode::MalformedScore: return "MalformedScore";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::UnknownRevisionScored: return "UnknownRevisionScored";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ConnectionRefused: return "ConnectionRefused";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
    case ErrorCode::OutOfOrder: return "OutOfOrder";
    case ErrorCode::NotFrozenInTest: return "NotFrozenInTest";
    case ErrorCode::EmptyCounts: return "EmptyCounts";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::IdSetMismatch: return "IdSetMismatch";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::InvalidFilter: return "InvalidFilter";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ClientDisconnect:
    case ErrorCode::MalformedScore:
    case ErrorCode::ScoreOutOfRange:
    case ErrorCode::UnknownRevisionScored:
    case ErrorCode::Timeout:
    case ErrorCode::ConnectionRefused:
    case ErrorCode::ProtocolViolation:
      return ErrorCategory::Protocol;
    case ErrorCode::Usage:
    case ErrorCode::InvalidConfig:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Data;
  }
}

/// Every failure raised by the library. `detail()` carries the numeric
/// context named by the error (line number, revision id, sequence number);
/// it is 0 when the error has none.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::int64_t detail = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  std::int64_t detail() const noexcept { return detail_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
  std::int64_t detail_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string message, std::int64_t detail = 0) {
  throw Error(code, std::move(message), detail);
}

}  // namespace wdvdb
