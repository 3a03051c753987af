#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cyclo {

enum class ErrorCode {
  // netlist-core
  SyntaxError,
  DuplicateDriver,
  UndeclaredWire,
  ArityError,
  UnsupportedGate,
  MissingAssignment,
  // cnf-engine
  ShareMismatch,
  NoKeys,
  BackendFailure,
  TooLargeForSimulationFallback,
  InvalidFormula,
  // cycle-analysis
  NotAnInput,
  IncompleteCycleSet,
  // locker
  InvalidRecipe,
  RegionTooShort,
  RegionNotAPath,
  InsufficientGates,
  InsufficientPaths,
  NoNonOccurringCombination,
  TargetSignalNotCoverable,
  NoMatchFound,
  // attacks
  OracleAmbiguous,
  InterfaceMismatch,
  // harness
  NonPositiveY,
  DegenerateFit,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cyclo
