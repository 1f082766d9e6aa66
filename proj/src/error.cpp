#include "stylereward/error.hpp"

namespace stylereward {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyDocument: return "EmptyDocument";
    case ErrorKind::EmptySource: return "EmptySource";
    case ErrorKind::EmptyGenerated: return "EmptyGenerated";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::SingleLevel: return "SingleLevel";
    case ErrorKind::UnknownLevel: return "UnknownLevel";
    case ErrorKind::MissingMidpoint: return "MissingMidpoint";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::UnknownStyle: return "UnknownStyle";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptPayload: return "CorruptPayload";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::InconsistentDim: return "InconsistentDim";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::GeneratorUnavailable: return "GeneratorUnavailable";
    case ErrorKind::JudgeError: return "JudgeError";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message,
                     std::optional<std::size_t> line) {
  std::string out = to_string(kind);
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(decorate(kind, message, line)),
      kind_(kind),
      line_(line) {}

}  // namespace stylereward
