#ifndef KAMFORGE_DIAGNOSTICS_H_
#define KAMFORGE_DIAGNOSTICS_H_

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kamforge/modulus.h"
#include "kamforge/schedule.h"

namespace kamforge {

// Advances (theta, action) by one iterate and returns the lifted angle
// increment. theta is kept reduced to [0, 2pi) by the caller.
using OrbitStep = std::function<double(double& theta, double& action)>;

struct RotationEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
};

RotationEstimate RotationNumber(const OrbitStep& step, double theta0, double action0,
                                long iters);

// Least-squares slope of log n_{i+1} against log n_i over the leading norms
// above `floor`. Throws TooFewPoints with fewer than three.
double FitConvergenceOrder(std::span<const double> norms,
                           double floor = 100.0 * std::numeric_limits<double>::epsilon());

// Per-step record shared by both engines.
struct StepMetrics {
  int nu = 0;
  int cutoff = 0;
  double f_norm_grid = 0.0;
  double f_norm_coeff = 0.0;
  double g_norm_grid = 0.0;   // twist engine only
  double g_norm_coeff = 0.0;  // twist engine only
  double shift = 0.0;         // |xi_{nu+1} - xi_nu| or |r*_{nu+1}|
  double shift_sum = 0.0;     // sum of |shift| so far
  double freq_residual = 0.0;
  double mean_norm = 0.0;     // |f_{0,nu}|
  double drift_norm = 0.0;    // |sum_i f_{0,i}| at the solved base point
  double transform_norm = 0.0;  // sup |W_{nu+1} - id| on the grid
  double intersection_margin = 0.0;  // twist engine only
};

inline constexpr int kNumHypotheses = 6;

struct HypothesisCheck {
  int nu = 0;
  // lhs / rhs of each hypothesis with all constants set to 1; <= 1 holds.
  std::array<double, kNumHypotheses> ratio{};
  std::array<bool, kNumHypotheses> holds{};
  std::array<bool, kNumHypotheses> applicable{};
};

enum class EngineKind { kTwist, kParam };

struct ConvergenceReport {
  std::vector<double> norms;
  double fitted_order = 0.0;
  bool order_available = false;
  std::vector<HypothesisCheck> hypotheses;
  double conjugacy_residual = 0.0;
  double frequency_residual = 0.0;
  std::string status;

  std::string ToJson() const;
  // nu, norm, H1_ratio, H1_holds, ..., H6_ratio, H6_holds
  std::string ToCsv() const;
};

ConvergenceReport HypothesisReport(KamSchedule schedule,
                                   const std::vector<StepMetrics>& metrics,
                                   EngineKind kind,
                                   const ModulusOfContinuity& omega_modulus =
                                       ModulusOfContinuity::Lipschitz());

// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void Add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace kamforge

#endif  // KAMFORGE_DIAGNOSTICS_H_
