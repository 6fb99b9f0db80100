#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltp {

/// Base for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConstructionError : public Error { using Error::Error; };
class OutOfCorridorError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class LookupError : public Error { using Error::Error; };
class StateError : public Error { using Error::Error; };
class TrainingDivergenceError : public Error { using Error::Error; };
class PlanningError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ltp
