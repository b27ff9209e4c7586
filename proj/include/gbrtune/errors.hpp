#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gbrtune {

/// Base for every error raised by the library. Validation errors map to
/// CLI exit status 2, IoError to exit status 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input: a config field out of range, a malformed argument.
class ValidationError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

enum class TraceErrorKind {
  EmptyFile,
  BadHeader,
  MalformedRow,
  NegativeBitrate,
  DuplicateTimestamp,
  GapTooLarge,
  InvalidArgument,
};

const char* to_string(TraceErrorKind kind);

/// Trace ingestion failure. `line()` is the 1-based input line, 0 when the
/// error is not tied to one row.
class TraceError : public ValidationError {
public:
  TraceError(TraceErrorKind kind, std::size_t line, const std::string& detail);

  TraceErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

private:
  TraceErrorKind kind_;
  std::size_t line_;
};

} // namespace gbrtune
