#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eprop {

// Non-finite or otherwise unusable numeric input to a state update.
class NumericInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Broken archive or update-history bookkeeping.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid configuration value or combination.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed binary event file. offset is the byte position of the problem.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)),
        reason_(what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
  std::size_t offset_;
};

}  // namespace eprop
