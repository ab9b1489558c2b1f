#pragma once

#include <stdexcept>
#include <string>

namespace chrg {

// Source-located syntax error (term reader, grammar files).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line, int col)
      : std::runtime_error(std::move(msg)), line(line), col(col) {}
  int line;
  int col;
};

// A production whose right-hand side has no grammar symbols.
class EmptyProductionError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Contract violation inside the engine (sort errors, malformed goals).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chrg
