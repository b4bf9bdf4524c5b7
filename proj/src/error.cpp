#include "sdl/error.hpp"

namespace sdl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSize: return "invalid-size";
    case ErrorKind::InvalidBranching: return "invalid-branching";
    case ErrorKind::InvalidPrecision: return "invalid-precision";
    case ErrorKind::InvalidModel: return "invalid-model";
    case ErrorKind::DegenerateBelief: return "degenerate-belief";
    case ErrorKind::UnknownAtom: return "unknown-atom";
    case ErrorKind::StrategyViolation: return "strategy-violation";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::ImpossibleHistory: return "impossible-history";
    case ErrorKind::SizeLimit: return "size-limit";
    case ErrorKind::Regime: return "regime";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace sdl
