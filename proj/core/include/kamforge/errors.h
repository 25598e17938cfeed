#ifndef KAMFORGE_ERRORS_H_
#define KAMFORGE_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace kamforge {

enum class ErrorKind {
  kInvalidArgument,
  kGridTooCoarse,
  kDegenerateSampleSet,
  kSmallDivisorBreach,
  kNonzeroMean,
  kBoundaryHit,
  kMeshExhausted,
  kNoRootInRegion,
  kToleranceUnreachable,
  kTargetOutsideRange,
  kDivergenceDetected,
  kNotDiophantine,
  kIntersectionLost,
  kInversionFailure,
  kBadExponents,
  kTooFewPoints,
  kConfigError,
};

std::string_view ErrorKindName(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class KamError : public std::runtime_error {
 public:
  KamError(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kamforge

#endif  // KAMFORGE_ERRORS_H_
