#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace citits {

enum class ErrorCode {
  DimensionMismatch,
  RoadMismatch,
  NonMonotonicTimestamps,
  OutOfRange,
  InsufficientSamples,
  NoData,
  EmptyRoadList,
  EmptyStopList,
  UnknownDestination,
  NoRouteFound,
  NoBusAvailable,
  StaleFix,
  ScoreSetMismatch,
  UnknownRoad,
  BadFormat,
  Overflow,
  DuplicateUsername,
  AuthFailed,
  IngestMissingFrame,
  CorruptRecord,
  BadConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the CSV loaders; carries the 1-based line that failed to parse.
class CorruptRecord : public Error {
 public:
  CorruptRecord(std::string file, std::size_t line, const std::string& why)
      : Error(ErrorCode::CorruptRecord,
              file + ":" + std::to_string(line) + ": corrupt record: " + why),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace citits
