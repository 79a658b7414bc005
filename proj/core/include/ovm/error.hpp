#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ovm {

enum class ErrorKind {
  NoSuchEdge,
  EmptySet,
  BadCounts,
  BadEdge,
  BadParams,
  Absorbed,
  NotAbsorbed,
  BudgetExceeded,
  DivergentThreshold,
  BadTolerance,
  BadR,
  ConfigError,
  IoError,
  SchemaMismatch,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports carries one of the kinds above so callers
// (the CLI in particular) can map it to an exit code without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace ovm
