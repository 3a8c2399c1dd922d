#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sdpack {

enum class ErrorCode {
  InvalidInput,
  NotPsd,
  SchemaError,
  ValidationError,
  DimensionMismatch,
  RangeInclusionFails,
  UnboundedInput,
  InfeasibleInput,
  RankNotOne,
  NonzeroR,
  NonzeroH0,
  InfeasiblePrimal,
  InfeasibleDual,
  WrongCriterion,
  InfeasibleDesign,
  MaxIterations,
  NumericalFailure,
  PathDiverged,
  PathNotMonotone,
  ZeroDual,
};

std::string_view to_string(ErrorCode code);

// Machine-checkable evidence attached to a failure: the offending eigenvalue,
// the constraint index, or the pair of dimensions that disagreed.
struct Witness {
  std::optional<double> eigenvalue;
  std::optional<int> index;
  std::optional<std::pair<long, long>> dimensions;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, Witness witness = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        witness_(std::move(witness)) {}

  ErrorCode code() const noexcept { return code_; }
  const Witness& witness() const noexcept { return witness_; }

 private:
  ErrorCode code_;
  Witness witness_;
};

}  // namespace sdpack
