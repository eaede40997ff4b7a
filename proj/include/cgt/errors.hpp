#pragma once

#include <stdexcept>
#include <string>

namespace cgt {

// Malformed word syntax or presentation file. `line`/`column` are 1-based;
// 0 means "not applicable" (e.g. a word passed programmatically).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line = 0, int column = 0)
      : std::runtime_error(std::move(message)), line(line), column(column) {}
  int line;
  int column;
};

// A configurable search or branching cap was exceeded.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cgt
