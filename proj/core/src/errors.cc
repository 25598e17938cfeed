#include "kamforge/errors.h"

namespace kamforge {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kGridTooCoarse: return "GridTooCoarse";
    case ErrorKind::kDegenerateSampleSet: return "DegenerateSampleSet";
    case ErrorKind::kSmallDivisorBreach: return "SmallDivisorBreach";
    case ErrorKind::kNonzeroMean: return "NonzeroMean";
    case ErrorKind::kBoundaryHit: return "BoundaryHit";
    case ErrorKind::kMeshExhausted: return "MeshExhausted";
    case ErrorKind::kNoRootInRegion: return "NoRootInRegion";
    case ErrorKind::kToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorKind::kTargetOutsideRange: return "TargetOutsideRange";
    case ErrorKind::kDivergenceDetected: return "DivergenceDetected";
    case ErrorKind::kNotDiophantine: return "NotDiophantine";
    case ErrorKind::kIntersectionLost: return "IntersectionLost";
    case ErrorKind::kInversionFailure: return "InversionFailure";
    case ErrorKind::kBadExponents: return "BadExponents";
    case ErrorKind::kTooFewPoints: return "TooFewPoints";
    case ErrorKind::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

KamError::KamError(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + detail),
      kind_(kind) {}

}  // namespace kamforge
