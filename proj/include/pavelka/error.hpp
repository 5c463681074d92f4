#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace pavelka {

enum class ErrorKind {
  Syntax,
  UnknownSymbol,
  ArityMismatch,
  ConstantRange,
  NameClash,
  VocabularyMismatch,
  UnassignedVariable,
  NotSentence,
  InvalidArgument,
  NonDiscrete,
  EmptyRestriction,
  OperationEscapes,
  Resolution,
  SearchTooLarge,
  Io,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this one exception type; `kind()`
// lets callers (and the CLI exit-code mapping) distinguish them.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(message), kind_(kind), position_(position) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Byte offset into the parsed text, for syntax-level errors.
  std::optional<std::size_t> position() const noexcept { return position_; }

private:
  ErrorKind kind_;
  std::optional<std::size_t> position_;
};

} // namespace pavelka
