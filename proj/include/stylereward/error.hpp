#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace stylereward {

enum class ErrorKind {
  EmptyDocument,
  EmptySource,
  EmptyGenerated,
  EmptyCorpus,
  SingleLevel,
  UnknownLevel,
  MissingMidpoint,
  ModeMismatch,
  UnknownStyle,
  InvalidConfig,
  VersionMismatch,
  CorruptPayload,
  MalformedLine,
  InconsistentDim,
  EmptyFile,
  MalformedRecord,
  GeneratorUnavailable,
  JudgeError,
  Io,
};

const char* to_string(ErrorKind kind);

// Every domain failure raised by the library. `line()` carries the 1-based
// line number for file parsers and the 0-based item index for batch paths.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

}  // namespace stylereward
