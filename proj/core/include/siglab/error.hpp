#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace siglab {

enum class ErrorCode {
  LabelTooLong,
  NameTooLong,
  Truncated,
  PointerLoop,
  CountMismatch,
  MalformedRecord,
  MessageTooLarge,
  UnsupportedSize,
  MixedRRSet,
  UnknownAlgorithmKey,
  TargetTooSmall,
  TooManyKeys,
  ParseError,
  EntryTooLarge,
  ConfigError,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures surface as siglab::Error; the code identifies the
// failure class, line() is non-zero for text-format parse failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace siglab
