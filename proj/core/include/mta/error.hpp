#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mta {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed text input; line numbers are 1-based and count the header.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A class has no samples where at least one is required.
class CoverageError : public Error {
 public:
  CoverageError(int cls, const std::string& what)
      : Error(what + " (class " + std::to_string(cls) + ")"), cls_(cls) {}
  int missing_class() const noexcept { return cls_; }

 private:
  int cls_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(long iteration, const std::string& what)
      : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace mta
