#include "mdit/error.hpp"

namespace mdit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::EmptyDataset: return "empty-dataset";
    case ErrorKind::CorruptInput: return "corrupt-input";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::Consistency: return "internal-consistency";
    case ErrorKind::Divergence: return "training-divergence";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::Config:
      return 2;
    case ErrorKind::Divergence:
      return 4;
    default:
      return 3;
  }
}

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out = "configuration invalid";
  for (const auto& v : violations) {
    out += "\n  - ";
    out += v;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorKind::Config, join_violations(violations)), violations_(std::move(violations)) {}

}  // namespace mdit
