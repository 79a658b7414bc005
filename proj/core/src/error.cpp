#include "ovm/error.hpp"

namespace ovm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoSuchEdge: return "NoSuchEdge";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::BadCounts: return "BadCounts";
    case ErrorKind::BadEdge: return "BadEdge";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::Absorbed: return "Absorbed";
    case ErrorKind::NotAbsorbed: return "NotAbsorbed";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::DivergentThreshold: return "DivergentThreshold";
    case ErrorKind::BadTolerance: return "BadTolerance";
    case ErrorKind::BadR: return "BadR";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ovm
