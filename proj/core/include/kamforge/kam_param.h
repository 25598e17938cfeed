#ifndef KAMFORGE_KAM_PARAM_H_
#define KAMFORGE_KAM_PARAM_H_

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

// f(theta, xi) written to out (n values).
using ParamPerturbation = std::function<void(std::span<const double> theta,
                                             std::span<const double> xi,
                                             std::span<double> out)>;

// theta -> theta + omega(xi) + epsilon * f(theta, xi) on T^n.
struct ParamMapModel {
  std::string name;
  FrequencyMap freq;
  ParamPerturbation perturbation;
  double epsilon = 0.0;
  double h0 = 0.5;
  std::vector<double> xi_star;
  std::vector<double> q;  // omega(xi_star)

  int dim() const { return freq.range_dim; }
  int param_dim() const { return freq.domain_dim; }
};

struct ParamIterationState {
  int nu = 0;
  FourierSeries f_nu;
  std::vector<double> xi_nu;
  ConjugacyChain chain;
  std::vector<StepMetrics> metrics;
  double f_norm = 0.0;
  bool converged = false;
};

// Samples of W^{-1} o F_xi o W - id - q on the grid, n values per point.
std::vector<double> ParamConjugatedSamples(const ParamMapModel& model,
                                           const ConjugacyChain& chain,
                                           std::span<const double> xi,
                                           const UniformGrid& grid);

ParamIterationState ParamInitialState(const ParamMapModel& model);

// One step: solve the frequency equation with the current chain, resample
// at the new parameter, solve the homological equation, extend the chain.
ParamIterationState ParamKamStep(const ParamIterationState& state,
                                 const ParamMapModel& model,
                                 const KamSchedule& schedule,
                                 const EngineConfig& config);

struct ParamResult {
  RunStatus status = RunStatus::kMaxSteps;
  bool converged = false;
  std::vector<double> xi_inf;
  ConjugacyChain chain;
  std::vector<StepMetrics> metrics;
  KamSchedule schedule;
  double conjugacy_residual = 0.0;
  double frequency_residual = 0.0;
  std::string diagnostic;
};

ParamResult ParamKamRun(const ParamMapModel& model, const EngineConfig& config);

// max over a uniform grid of |W(phi + q) - F_xi(W(phi))|.
double ParamConjugacyResidual(const ParamMapModel& model, const ConjugacyChain& chain,
                              std::span<const double> xi, int points_per_axis);

// nu, K, f_norm_grid, f_norm_coeff, xi_shift, freq_residual
std::string ParamMetricsCsv(const std::vector<StepMetrics>& metrics);

}  // namespace kamforge

#endif  // KAMFORGE_KAM_PARAM_H_
