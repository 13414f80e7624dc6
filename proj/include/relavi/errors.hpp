#pragma once

#include <stdexcept>
#include <string>

namespace relavi {

/// Error in PPDDL / feature / snapshot text. Carries a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line_(line), col_(col) {}
  explicit ParseError(std::string msg) : std::runtime_error(std::move(msg)), line_(0), col_(0) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

/// Invalid configuration or argument values (exit code 2 at the CLI).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relavi
