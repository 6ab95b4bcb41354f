#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace supportest {

/// Base class for every error raised by the library. `kind()` is a stable,
/// machine-readable tag used by the CLI error record.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error("parameter", what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("parse", "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("format", "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : Error("decode", "byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& what) : Error("empty_input", what) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error("io", path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Polynomial degree L = floor(c0 ln k) came out as zero.
class DegenerateDegreeError : public Error {
 public:
  explicit DegenerateDegreeError(const std::string& what) : Error("degenerate_degree", what) {}
};

/// The estimator is not defined on this input (e.g. zero sample coverage).
class UndefinedEstimatorError : public Error {
 public:
  explicit UndefinedEstimatorError(const std::string& what) : Error("undefined_estimator", what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error("solver", what) {}
};

class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& what) : Error("precision", what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error("internal", what) {}
};

}  // namespace supportest
