#pragma once

#include <stdexcept>
#include <string>

namespace qdv {

// Malformed arguments: bad bit strings, out-of-range indices, unknown nodes.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation not allowed in the current status of an entangled pair.
class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// State that cannot be measured (zero norm) or a probe value that is neither
// the alive nor the flagged signal.
class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdv
