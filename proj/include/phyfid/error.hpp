#pragma once

#include <stdexcept>
#include <string>

namespace phyfid {

enum class ErrorKind {
  shape,    // mismatched or too-small dimensions
  length,   // wrong number of frames / flows
  config,   // invalid parameters or configuration
  io,       // unreadable or unwritable file
  numeric,  // non-finite values or failed numerics
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::shape, what) {}
};

class LengthError : public Error {
 public:
  explicit LengthError(const std::string& what) : Error(ErrorKind::length, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace phyfid
