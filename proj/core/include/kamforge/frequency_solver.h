#ifndef KAMFORGE_FREQUENCY_SOLVER_H_
#define KAMFORGE_FREQUENCY_SOLVER_H_

#include <span>
#include <string>
#include <vector>

#include "kamforge/frequency_map.h"

namespace kamforge {

// Sign-counting degree of omega - p on [a, b] (m = n = 1).
int Degree1d(const FrequencyMap& map, double a, double b, double p);

// Winding number of omega - p along the boundary of a 2d box. `mesh` is the
// initial number of samples per side.
int Degree2d(const FrequencyMap& map, const Box& box, std::span<const double> p,
             int mesh = 64);

// drift(x) is added to omega(x); an empty function means zero drift.
using DriftFn = VectorFn;

struct FrequencySolution {
  std::vector<double> x;
  double residual = 0.0;  // sup-norm of omega(x) + drift(x) - target
  int evaluations = 0;
};

// Solves omega(x) + drift(x) = target for x within trust_radius of start,
// choosing the root closest to start.
FrequencySolution SolveFrequencyEquation(const FrequencyMap& map, const DriftFn& drift,
                                         std::span<const double> target,
                                         std::span<const double> start,
                                         double trust_radius, double tol);

// Least-residual solve over the whole region for m != n. Residuals above
// `clearance` after refinement mean the target is not in the range.
FrequencySolution SolveFrequencyRangeMode(const FrequencyMap& map, const DriftFn& drift,
                                          std::span<const double> target,
                                          std::span<const double> start, double tol,
                                          double clearance = 1e-3);

struct LedgerStep {
  int nu = 0;
  std::vector<double> shift;
  double shift_norm = 0.0;
  double mu = 0.0;
  double residual = 0.0;
};

class TranslationLedger {
 public:
  void Append(int nu, std::vector<double> shift, double mu, double residual);
  const std::vector<LedgerStep>& steps() const { return steps_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  // nu, shift_0.., shift_norm, mu, ratio, residual
  std::string ToCsv() const;

 private:
  std::vector<LedgerStep> steps_;
  std::vector<double> cumulative_;
};

struct CauchyReport {
  std::vector<double> ratios;
  double max_ratio = 0.0;
  bool flagged = false;
  int flagged_step = -1;
};

// Shifts at or below this size are treated as rounding noise.
inline constexpr double kShiftNoiseFloor = 1e-13;

CauchyReport CauchyMonitor(const TranslationLedger& ledger);
CauchyReport CauchyMonitor(const TranslationLedger& ledger, std::span<const double> mu);

std::string FormatDouble(double v);

}  // namespace kamforge

#endif  // KAMFORGE_FREQUENCY_SOLVER_H_
