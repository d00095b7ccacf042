#pragma once

#include <stdexcept>
#include <string>

namespace csvm {

enum class Errc {
  MalformedRow,
  InvalidEncoding,
  InvariantViolation,
  LengthMismatch,
  IndexOutOfRange,
  DuplicateHeader,
  MissingColumn,
  AmbiguousColumn,
  OddTokenCount,
  CountMismatch,
  NonNumericCell,
  ForeignKeyToUndeclaredTable,
  BlockLongerThanData,
  MalformedResult,
  RootNotFound,
  PermissionDenied,
  DegenerateCurve,
  NonConvergence,
  InsufficientPoints,
  SingularDesign,
  NonPositiveSlope,
  UnknownSpecies,
  UnknownRate,
  MalformedExpression,
  NegativeConcentration,
  NonFiniteState,
  InvalidArgument,
};

const char* errc_name(Errc code);

/// Exception carrying a machine-checkable code next to the human message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace csvm
