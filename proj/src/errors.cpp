#include "deun/errors.hpp"

namespace deun {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::OrderingViolated: return "OrderingViolated";
    case ErrorKind::NotDecomposable: return "NotDecomposable";
    case ErrorKind::SelfReferentialMean: return "SelfReferentialMean";
    case ErrorKind::NotConstant: return "NotConstant";
    case ErrorKind::DegenerateUtility: return "DegenerateUtility";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorKind::PendingVariable: return "PendingVariable";
    case ErrorKind::ExpansionTooLarge: return "ExpansionTooLarge";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SelfLoop:
    case ErrorKind::CycleDetected:
    case ErrorKind::OrderingViolated:
    case ErrorKind::ValidationError:
      return 1;
    case ErrorKind::ParseError:
    case ErrorKind::Io:
      return 3;
    default:
      return 2;
  }
}

}  // namespace deun
