#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace loadsched {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A clock value that does not fall on a slot boundary.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Hysteresis state advanced with a non-increasing slot.
class SequencingError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// A run has no feasible start slot. `run()` names it as "<id>#<index>".
class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string run, const std::string& what)
      : Error(what), run_(std::move(run)) {}
  const std::string& run() const noexcept { return run_; }

 private:
  std::string run_;
};

/// Brute-force enumeration would exceed its size guard.
class SizeError : public Error {
 public:
  using Error::Error;
};

class DivisionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invariant violations collected while checking a model or schedule.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  explicit ValidationError(const std::string& problem)
      : ValidationError(std::vector<std::string>{problem}) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace loadsched
