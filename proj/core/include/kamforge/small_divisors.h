#ifndef KAMFORGE_SMALL_DIVISORS_H_
#define KAMFORGE_SMALL_DIVISORS_H_

#include <span>
#include <vector>

#include "kamforge/fourier.h"

namespace kamforge {

// Whether angles are measured on R/2piZ (default) or R/Z.
enum class AnglePeriod { kTwoPi, kOne };

struct DiophantineParams {
  double gamma = 1.0;
  double tau = 1.5;
  // Bound on |omega|; nonpositive means "derive from omega".
  double bound = 0.0;
  int k_max = 50;
  AnglePeriod period = AnglePeriod::kTwoPi;
};

struct DivisorReport {
  MultiIndex worst_k;
  double worst_value = 0.0;
  bool satisfied = false;
};

// worst_value = min over 0 < |k|_1 <= k_max of |k|^tau * dist(<k,omega>, P*Z)
// with P the angle period.
DivisorReport CheckDiophantine(std::span<const double> omega,
                               const DiophantineParams& params);

// 2*pi*alpha where alpha = [0; prefix..., tail, tail, ...]. Entries must be
// 1 or 2 and the tail must be non-empty.
double GoldenLikeFrequency(std::span<const int> tail,
                           std::span<const int> prefix = {});

inline constexpr double kDefaultDivisorGuard = 1e-8;

// U with U(theta + omega) - U(theta) = rhs(theta), U_0 = 0.
FourierSeries SolveHomological(const FourierSeries& rhs, std::span<const double> omega,
                               double guard = kDefaultDivisorGuard);

// |exp(i<k,omega>) - 1| computed without cancellation.
double DivisorModulus(std::span<const int> k, std::span<const double> omega);

}  // namespace kamforge

#endif  // KAMFORGE_SMALL_DIVISORS_H_
