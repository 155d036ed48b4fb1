// Exception types shared by every turnkit module.
#ifndef TURNKIT_ERROR_H_
#define TURNKIT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace turnkit {

// Violated precondition or inconsistent in-memory input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed text input. Line and column are 1-based; column 0 means the
// whole line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string &what)
      : std::runtime_error(Format(line, column, what)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string Format(std::size_t line, std::size_t column,
                            const std::string &what) {
    std::string s = "line " + std::to_string(line);
    if (column > 0) s += ", column " + std::to_string(column);
    return s + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace turnkit

#endif  // TURNKIT_ERROR_H_
