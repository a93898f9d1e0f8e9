#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace medner {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data: corpus files, vocabularies, checkpoints, results tables.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what), line_(line) {}

  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

/// BIO sequence violation at a given token index.
class BioError : public FormatError {
 public:
  BioError(const std::string& what, std::size_t index)
      : FormatError("token " + std::to_string(index) + ": " + what), index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Invalid sizes, fractions or hyperparameters supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or gradient.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::string tensor = {})
      : Error(what), tensor_(std::move(tensor)) {}

  const std::string& tensor() const { return tensor_; }

 private:
  std::string tensor_;
};

}  // namespace medner
