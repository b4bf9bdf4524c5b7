#pragma once

#include <stdexcept>
#include <string>

namespace sdl {

enum class ErrorKind {
  InvalidSize,
  InvalidBranching,
  InvalidPrecision,
  InvalidModel,
  DegenerateBelief,
  UnknownAtom,
  StrategyViolation,
  InvalidParameter,
  ImpossibleHistory,
  SizeLimit,
  Regime,
  Domain,
  Truncation,
  Parse,
  Validation,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sdl
