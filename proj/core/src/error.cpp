#include "sdpack/error.hpp"

namespace sdpack {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RangeInclusionFails: return "RangeInclusionFails";
    case ErrorCode::UnboundedInput: return "UnboundedInput";
    case ErrorCode::InfeasibleInput: return "InfeasibleInput";
    case ErrorCode::RankNotOne: return "RankNotOne";
    case ErrorCode::NonzeroR: return "NonzeroR";
    case ErrorCode::NonzeroH0: return "NonzeroH0";
    case ErrorCode::InfeasiblePrimal: return "InfeasiblePrimal";
    case ErrorCode::InfeasibleDual: return "InfeasibleDual";
    case ErrorCode::WrongCriterion: return "WrongCriterion";
    case ErrorCode::InfeasibleDesign: return "InfeasibleDesign";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::PathDiverged: return "PathDiverged";
    case ErrorCode::PathNotMonotone: return "PathNotMonotone";
    case ErrorCode::ZeroDual: return "ZeroDual";
  }
  return "Unknown";
}

}  // namespace sdpack
