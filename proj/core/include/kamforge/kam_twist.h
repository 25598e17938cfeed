#ifndef KAMFORGE_KAM_TWIST_H_
#define KAMFORGE_KAM_TWIST_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kamforge/conjugacy_chain.h"
#include "kamforge/diagnostics.h"
#include "kamforge/engine.h"
#include "kamforge/fourier.h"
#include "kamforge/frequency_map.h"
#include "kamforge/schedule.h"

namespace kamforge {

// (theta, r) -> out, n values.
using TwistPerturbation = std::function<void(std::span<const double> theta,
                                             std::span<const double> r,
                                             std::span<double> out)>;

// Full displacement (theta1 - theta, r1 - r).
using TwistDisplacement =
    std::function<void(std::span<const double> theta, std::span<const double> r,
                       std::span<double> dtheta, std::span<double> dr)>;

// theta1 = theta + omega(r) + epsilon f(theta, r), r1 = r + epsilon g(theta, r).
struct TwistMapModel {
  std::string name;
  FrequencyMap freq;
  TwistPerturbation f_pert;
  TwistPerturbation g_pert;
  // Optional closed form of the whole step; preferred over omega + eps*f when
  // the perturbation is a difference quotient.
  TwistDisplacement displacement;
  double epsilon = 0.0;
  std::vector<double> r_star;
  std::vector<double> p;  // omega(r_star)
  bool intersection = true;
  bool area_preserving = false;

  int dim() const { return freq.range_dim; }
  void Displace(std::span<const double> theta, std::span<const double> r,
                std::span<double> dtheta, std::span<double> dr) const;
};

struct TwistIterationState {
  int nu = 0;
  FourierSeries f_nu;
  FourierSeries g_nu;
  std::vector<double> r_hat;
  std::vector<double> rotation;  // p, or the drifting rotation under ablation
  double shift_sum = 0.0;
  ConjugacyChain chain;
  std::vector<StepMetrics> metrics;
  double norm = 0.0;  // |f_nu| + |g_nu| on the grid
  bool converged = false;
};

// Displacements (a, b) of W^{-1} o F o W at chain coordinates (phi, s):
// a = phi1 - phi - rotation, b = s1 - s.
void TwistConjugatedDisplacement(const TwistMapModel& model, const ConjugacyChain& chain,
                                 std::span<const double> rotation,
                                 std::span<const double> phi, std::span<const double> s,
                                 std::span<double> a, std::span<double> b);

TwistIterationState TwistInitialState(const TwistMapModel& model);

TwistIterationState TwistKamStep(const TwistIterationState& state,
                                 const TwistMapModel& model,
                                 const KamSchedule& schedule,
                                 const EngineConfig& config);

struct TwistResult {
  RunStatus status = RunStatus::kMaxSteps;
  bool converged = false;
  std::vector<double> r_hat_inf;
  std::vector<double> r_tilde;   // r_hat_inf - r_star
  std::vector<double> rotation;  // rotation of the rigid model
  double shift_sum = 0.0;
  ConjugacyChain chain;
  std::vector<StepMetrics> metrics;
  KamSchedule schedule;
  int degree = 0;
  double conjugacy_residual = 0.0;
  double frequency_residual = 0.0;
  std::string diagnostic;
};

TwistResult TwistKamRun(const TwistMapModel& model, const EngineConfig& config);

// max over a uniform grid of |K(phi + rotation) - F(K(phi))|, K = W(., r_hat).
double TwistConjugacyResidual(const TwistMapModel& model, const ConjugacyChain& chain,
                              std::span<const double> r_hat,
                              std::span<const double> rotation, int points_per_axis);

// Minimum over nodes r of min(max_phi b, -min_phi b); negative when the
// action displacement fails to change sign on some circle.
double IntersectionMargin(const TwistMapModel& model, const ConjugacyChain& chain,
                          std::span<const double> rotation, const UniformGrid& grid,
                          std::span<const double> center, double half_width,
                          int nodes = 9);

// Param columns followed by g_norm, r_shift, shift_sum, intersection_margin.
std::string TwistMetricsCsv(const std::vector<StepMetrics>& metrics);

}  // namespace kamforge

#endif  // KAMFORGE_KAM_TWIST_H_
