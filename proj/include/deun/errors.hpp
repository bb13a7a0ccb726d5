#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deun {

enum class ErrorKind {
  // structural
  SelfLoop,
  CycleDetected,
  OrderingViolated,
  NotDecomposable,
  // symbolic kernel
  SelfReferentialMean,
  NotConstant,
  // model
  DegenerateUtility,
  OutOfDomain,
  InvalidArgument,
  // engine / oracle
  UnsupportedCombination,
  PendingVariable,
  ExpansionTooLarge,
  TooLarge,
  NonConvergence,
  // io
  ParseError,
  ValidationError,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Process exit status for a failure of this kind: 1 validation, 2 computation, 3 I/O.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace deun
