#pragma once

#include <stdexcept>
#include <string>

namespace mktent {

enum class ErrorCode {
  InvalidArgument,
  MissingColumn,
  EmptyInput,
  AmbiguousTimestampFormat,
  TooShort,
  OutOfRange,
  EmptyWindow,
  DegenerateDenominator,
  SeriesTooShort,
  InsufficientBaseline,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mktent
