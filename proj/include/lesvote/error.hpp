#pragma once

#include <stdexcept>
#include <string>

namespace lesvote {

enum class ErrorKind {
  dimension,
  symmetry,
  singular,
  parameter,
  insufficient_data,
  blocking,
  not_psd,
  feasibility,
  convergence,
  shape,
  degenerate_data,
  value,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for everything the library reports. The kind lets callers
/// and tests distinguish failure classes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error raised by a pipeline stage, carrying the stage name (e.g. "extract",
/// "weights") so CLI diagnostics can be tagged.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), "[" + stage + "] " + cause.what()),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace lesvote
