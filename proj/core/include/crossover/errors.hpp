#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace crossover {

// Base of every error raised by the library. kind() is the stable class name
// the CLI prints on the diagnostic stream.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

#define CROSSOVER_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  };

CROSSOVER_DEFINE_ERROR(InvalidSpec)
CROSSOVER_DEFINE_ERROR(InvalidOp)
CROSSOVER_DEFINE_ERROR(InvalidQuery)
CROSSOVER_DEFINE_ERROR(InvalidQueryLength)
CROSSOVER_DEFINE_ERROR(EmptySample)
CROSSOVER_DEFINE_ERROR(InsufficientTail)
CROSSOVER_DEFINE_ERROR(DegenerateTail)
CROSSOVER_DEFINE_ERROR(NoCrossing)
CROSSOVER_DEFINE_ERROR(InsufficientData)
CROSSOVER_DEFINE_ERROR(BackendUnavailable)
CROSSOVER_DEFINE_ERROR(BackendRejected)
CROSSOVER_DEFINE_ERROR(ConfigError)
CROSSOVER_DEFINE_ERROR(IoError)

#undef CROSSOVER_DEFINE_ERROR

// Malformed input text. line() is 1-based when the source is line-oriented.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : Error("ParseError", line ? what + " (line " + std::to_string(*line) + ")" : what),
        line_(line) {}
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::optional<std::size_t> line_;
};

}  // namespace crossover
