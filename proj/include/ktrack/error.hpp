#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ktrack {

/// Error classes surfaced by the library. The CLI maps each class onto a
/// stable process exit code (see exit_code()).
enum class ErrorKind {
  InvalidParameter,
  InvalidSpec,
  DegenerateUpdate,
  LookaheadUnavailable,
  UndefinedMetric,
  Parse,
  UnsupportedVersion,
  Io,
  Protocol,
  Transport,
  TrackerReported,
  SessionOpen,
  NothingToPlot,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for an error class; 0 and 1 are reserved for success
/// and unexpected failures, 2 for command-line usage errors.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error reported by an external tracker through the bridge protocol; keeps
/// the adapter's own error code.
class TrackerError : public Error {
 public:
  TrackerError(std::string code, const std::string& message)
      : Error(ErrorKind::TrackerReported, message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace ktrack
