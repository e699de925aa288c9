#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sptb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree (dims, orders, matrix rows).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid block size, mode subset, kernel/format pairing, and similar.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A coordinate lies outside the tensor dims.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Arithmetic with no defined result, e.g. division by an absent element.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Dense oracle would exceed its element cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sptb
