#pragma once

#include <stdexcept>
#include <string>

namespace theoria {

// Semantic error: an invariant violation (unknown symbol, arity clash, ...).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Syntax error with source position.
struct ParseError : Error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : Error(msg + " at line " + std::to_string(line_) + ", column " +
              std::to_string(col_)),
        line(line_),
        col(col_) {}
};

// A search or enumeration exceeded its configured cap.
struct ResourceLimit : Error {
  using Error::Error;
};

}  // namespace theoria
