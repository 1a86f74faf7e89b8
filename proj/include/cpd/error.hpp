#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cpd/model.hpp"

namespace cpd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Malformed input file; `where` is a JSON pointer or "line:column".
class ParseError : public Error {
 public:
  ParseError(std::string where, const std::string& what);
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

}  // namespace cpd
