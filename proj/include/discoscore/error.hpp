#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace discoscore {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Shape or dimension disagreement between inputs.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's domain (zero norm, zero variance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A hypothesis without any focus cannot be normalised by its focus count.
class NoFociError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Network failure talking to an embedding service; may succeed on retry.
class TransportError : public Error {
 public:
  using Error::Error;
  bool retryable() const { return true; }
};

// The embedding service answered, but not with what the protocol requires.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace discoscore
