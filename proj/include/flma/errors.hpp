#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flma {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input; carries a 1-based line number when one is known.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// Label names of two artifacts (e.g. a rule file and a score header) disagree.
class LabelMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace flma
