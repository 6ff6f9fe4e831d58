#pragma once

#include <stdexcept>
#include <string>

namespace iconforge {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit code 1; anything else is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (scene documents, DSL programs, config files).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0, int column = 0)
      : Error(line > 0 ? "line " + std::to_string(line) +
                             (column > 0 ? ":" + std::to_string(column) : "") +
                             ": " + message
                       : message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Network or protocol failure talking to the chat-completion endpoint.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace iconforge
