#include "cyclo/error.hpp"

namespace cyclo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateDriver: return "DuplicateDriver";
    case ErrorCode::UndeclaredWire: return "UndeclaredWire";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::UnsupportedGate: return "UnsupportedGate";
    case ErrorCode::MissingAssignment: return "MissingAssignment";
    case ErrorCode::ShareMismatch: return "ShareMismatch";
    case ErrorCode::NoKeys: return "NoKeys";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::TooLargeForSimulationFallback: return "TooLargeForSimulationFallback";
    case ErrorCode::InvalidFormula: return "InvalidFormula";
    case ErrorCode::NotAnInput: return "NotAnInput";
    case ErrorCode::IncompleteCycleSet: return "IncompleteCycleSet";
    case ErrorCode::InvalidRecipe: return "InvalidRecipe";
    case ErrorCode::RegionTooShort: return "RegionTooShort";
    case ErrorCode::RegionNotAPath: return "RegionNotAPath";
    case ErrorCode::InsufficientGates: return "InsufficientGates";
    case ErrorCode::InsufficientPaths: return "InsufficientPaths";
    case ErrorCode::NoNonOccurringCombination: return "NoNonOccurringCombination";
    case ErrorCode::TargetSignalNotCoverable: return "TargetSignalNotCoverable";
    case ErrorCode::NoMatchFound: return "NoMatchFound";
    case ErrorCode::OracleAmbiguous: return "OracleAmbiguous";
    case ErrorCode::InterfaceMismatch: return "InterfaceMismatch";
    case ErrorCode::NonPositiveY: return "NonPositiveY";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cyclo
