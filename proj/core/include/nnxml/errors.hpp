#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace nnxml {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value violates a domain constraint (negative label entry, NaN, ...).
class ValueError : public Error {
 public:
  using Error::Error;
};

/// A configuration struct is out of range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An index argument is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// A linear system that must be solved has no unique solution.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Malformed or truncated model container.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public ModelFormatError {
 public:
  ChecksumError(const std::string& what, std::string section)
      : ModelFormatError(what), section_(std::move(section)) {}
  const std::string& section() const noexcept { return section_; }

 private:
  std::string section_;
};

class UnsupportedVersionError : public ModelFormatError {
 public:
  UnsupportedVersionError(const std::string& what, unsigned version)
      : ModelFormatError(what), version_(version) {}
  unsigned version() const noexcept { return version_; }

 private:
  unsigned version_;
};

}  // namespace nnxml
