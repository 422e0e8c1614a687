#pragma once

#include <stdexcept>
#include <string>

namespace fgl {

// A pivot or triangular diagonal entry rounds to zero on the target grid.
class SingularInFormatError : public std::runtime_error {
 public:
  SingularInFormatError(const std::string& what, std::string format_name)
      : std::runtime_error(what), format_(std::move(format_name)) {}
  const std::string& format_name() const { return format_; }

 private:
  std::string format_;
};

// A Givens sine reached |s| >= 1 - u.
class AssumptionViolatedError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class UnsupportedFieldError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fgl
