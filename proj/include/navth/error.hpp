#pragma once

#include <stdexcept>
#include <string>

namespace navth {

/// Base error carrying a machine-readable code (used verbatim on the wire).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Document does not match its schema; `path` names the offending field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& message)
      : Error("schema_violation", path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& message) : Error("invariant_violation", message) {}
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& message) : Error("generation_failed", message) {}
};

class PreconditionError : public Error {
 public:
  PreconditionError(std::string code, const std::string& message)
      : Error(std::move(code), message) {}
};

}  // namespace navth
