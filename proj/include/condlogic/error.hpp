#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace condlogic {

// Base for every error raised by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a structural invariant (e.g. a Required group with two
// conditions, a fact naming an unknown variable).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Input text or records could not be interpreted.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A recoverable problem with one input record.
struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class GenerationExhausted : public Error {
 public:
  using Error::Error;
};

class InsufficientBank : public Error {
 public:
  using Error::Error;
};

// Files that cannot be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace condlogic
