#pragma once

#include <stdexcept>
#include <string>

namespace ilwb {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Theory-file / formula syntax errors, with 1-based source position.
class ParseError : public Error {
public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line(line), column(column) {}
  int line;
  int column;
};

// A formula or model was used against the wrong language.
class LanguageMismatch : public Error {
public:
  using Error::Error;
};

// A construction exceeded the configured work budget.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

} // namespace ilwb
