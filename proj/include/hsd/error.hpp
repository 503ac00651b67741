#pragma once

#include <stdexcept>
#include <string>

namespace hsd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when an affine map has no integer affine inverse.
class NotInvertible : public Error {
 public:
  NotInvertible(const std::string& what, std::string determinant)
      : Error(what), determinant_(std::move(determinant)) {}
  const std::string& determinant() const { return determinant_; }

 private:
  std::string determinant_;
};

class UnboundedDomain : public Error {
 public:
  using Error::Error;
};

/// Text-level error. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }
  int line_;
  int column_;
};

/// A name (node, dimension, parameter) that does not resolve.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, std::string name) : Error(what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class NonUniformDependence : public Error {
 public:
  using Error::Error;
};

class NonRectangularDomain : public Error {
 public:
  using Error::Error;
};

/// A file that cannot be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsd
