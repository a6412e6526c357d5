#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mdit {

enum class ErrorKind {
  InvalidParameter,
  Config,
  Io,
  EmptyDataset,
  CorruptInput,
  DegenerateInput,
  Consistency,
  Divergence,
};

const char* to_string(ErrorKind kind);

// Process exit code for a failure of the given kind: 2 config, 3 data, 4 numeric.
int exit_code_for(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class InvalidParameter : public Error {
public:
  explicit InvalidParameter(const std::string& what) : Error(ErrorKind::InvalidParameter, what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class EmptyDatasetError : public Error {
public:
  explicit EmptyDatasetError(const std::string& what) : Error(ErrorKind::EmptyDataset, what) {}
};

class CorruptInputError : public Error {
public:
  explicit CorruptInputError(const std::string& what) : Error(ErrorKind::CorruptInput, what) {}
};

class DegenerateInputError : public Error {
public:
  explicit DegenerateInputError(const std::string& what)
      : Error(ErrorKind::DegenerateInput, what) {}
};

class ConsistencyError : public Error {
public:
  explicit ConsistencyError(const std::string& what) : Error(ErrorKind::Consistency, what) {}
};

class DivergenceError : public Error {
public:
  explicit DivergenceError(const std::string& what) : Error(ErrorKind::Divergence, what) {}
};

// Collects every violation found while validating a configuration.
class ConfigError : public Error {
public:
  explicit ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  std::vector<std::string> violations_;
};

}  // namespace mdit
