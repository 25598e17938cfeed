#include "kamforge/kam_param.h"

#include <algorithm>
#include <cmath>

#include "kamforge/errors.h"
#include "kamforge/frequency_solver.h"
#include "kamforge/small_divisors.h"

namespace kamforge {
namespace {

double MaxAbs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> ComponentMeans(std::span<const double> samples, int n) {
  std::vector<CompensatedSum> sums(n);
  const size_t points = samples.size() / n;
  for (size_t p = 0; p < points; ++p) {
    for (int a = 0; a < n; ++a) sums[a].Add(samples[p * n + a]);
  }
  std::vector<double> out(n);
  for (int a = 0; a < n; ++a) out[a] = sums[a].value() / static_cast<double>(points);
  return out;
}

void ValidateModel(const ParamMapModel& model) {
  const int n = model.dim();
  const int m = model.param_dim();
  if (n < 1 || m < 1 || !model.perturbation || !model.freq.eval) {
    throw KamError(ErrorKind::kInvalidArgument, "incomplete parameter model");
  }
  if (static_cast<int>(model.xi_star.size()) != m ||
      static_cast<int>(model.q.size()) != n) {
    throw KamError(ErrorKind::kInvalidArgument, "base parameter or target has wrong size");
  }
  if (!(model.epsilon >= 0.0)) {
    throw KamError(ErrorKind::kInvalidArgument, "epsilon must be nonnegative");
  }
}

}  // namespace

std::vector<double> ParamConjugatedSamples(const ParamMapModel& model,
                                           const ConjugacyChain& chain,
                                           std::span<const double> xi,
                                           const UniformGrid& grid) {
  const int n = model.dim();
  const std::vector<double> omega = model.freq(xi);
  const std::vector<double> phi = GridPoints(grid);
  std::vector<double> out(phi.size());
  std::vector<double> theta(n), f(n), phi1(n);
  for (int p = 0; p < grid.num_points(); ++p) {
    const std::span<const double> x(phi.data() + static_cast<size_t>(p) * n, n);
    chain.MapAngles(x, theta);
    model.perturbation(theta, xi, f);
    for (int a = 0; a < n; ++a) theta[a] += omega[a] + model.epsilon * f[a];
    chain.InvertAngles(theta, phi1);
    for (int a = 0; a < n; ++a) {
      out[static_cast<size_t>(p) * n + a] = phi1[a] - x[a] - model.q[a];
    }
  }
  return out;
}

ParamIterationState ParamInitialState(const ParamMapModel& model) {
  ValidateModel(model);
  ParamIterationState state;
  state.xi_nu = model.xi_star;
  state.chain = ConjugacyChain(model.dim());
  return state;
}

ParamIterationState ParamKamStep(const ParamIterationState& state,
                                 const ParamMapModel& model,
                                 const KamSchedule& schedule,
                                 const EngineConfig& config) {
  const int n = model.dim();
  const int nu = state.nu;
  ParamIterationState next = state;
  StepGrid sg = MakeStepGrid(schedule, nu, n, config);

  // Raise the cutoff while the discarded band is above the stopping tolerance.
  std::vector<double> samples;
  for (;;) {
    samples = ParamConjugatedSamples(model, state.chain, state.xi_nu, sg.grid);
    if (!std::isfinite(MaxAbs(samples))) break;
    next.f_nu = AnalyzeReal(sg.grid, n, samples, sg.analysis_cutoff);
    if (BandTail(next.f_nu, sg.cutoff) <= 0.1 * config.tol) break;
    if (!RefineStepGrid(sg, config)) break;
  }
  StepMetrics m;
  m.nu = nu;
  m.cutoff = sg.cutoff;
  m.f_norm_grid = MaxAbs(samples);
  m.mean_norm = SupNorm(ComponentMeans(samples, n));
  m.shift_sum = state.metrics.empty() ? 0.0 : state.metrics.back().shift_sum;
  next.f_norm = m.f_norm_grid;
  if (!std::isfinite(m.f_norm_grid)) {
    throw KamError(ErrorKind::kDivergenceDetected, "non-finite perturbation samples");
  }
  m.f_norm_coeff = StripNorm(next.f_nu.WithCutoff(sg.cutoff), schedule.h[nu],
                             StripNormFlavor::kCoeffWeighted);
  if (m.f_norm_grid < config.tol) {
    next.converged = true;
    next.metrics.push_back(m);
    return next;
  }

  // Frequency equation with the accumulated mean drift of the current chain.
  const DriftFn drift = [&](std::span<const double> xi) {
    const std::vector<double> s = ParamConjugatedSamples(model, state.chain, xi, sg.grid);
    std::vector<double> d = ComponentMeans(s, n);
    const std::vector<double> omega = model.freq(xi);
    for (int a = 0; a < n; ++a) d[a] += model.q[a] - omega[a];
    return d;
  };
  const FrequencySolution sol =
      config.range_mode
          ? SolveFrequencyRangeMode(model.freq, drift, model.q, state.xi_nu, config.freq_tol)
          : SolveFrequencyEquation(model.freq, drift, model.q, state.xi_nu,
                                   config.trust_radius, config.freq_tol);
  next.xi_nu = sol.x;
  std::vector<double> shift(sol.x.size());
  for (size_t a = 0; a < shift.size(); ++a) shift[a] = sol.x[a] - state.xi_nu[a];
  m.shift = SupNorm(shift);
  m.shift_sum += m.shift;
  m.freq_residual = sol.residual;
  {
    const std::vector<double> omega = model.freq(sol.x);
    double d = 0.0;
    for (int a = 0; a < n; ++a) d = std::max(d, std::abs(omega[a] - model.q[a]));
    m.drift_norm = d;
  }

  // Resample at the new parameter and remove the oscillating part.
  if (m.shift != 0.0) {
    samples = ParamConjugatedSamples(model, state.chain, sol.x, sg.grid);
  }
  const FourierSeries f_new = AnalyzeReal(sg.grid, n, samples, sg.analysis_cutoff);
  const Truncation tr = Truncate(f_new, sg.cutoff, schedule.h[nu + 1]);
  FourierSeries u = TrimSeries(SolveHomological(tr.truncated, model.q, config.guard));
  m.transform_norm = StripNorm(u, 0.0, StripNormFlavor::kGridSup);
  next.chain.Append(std::move(u));
  next.chain.translations().Append(nu, shift, m.f_norm_grid, sol.residual);
  next.metrics.push_back(m);
  next.nu = nu + 1;
  return next;
}

double ParamConjugacyResidual(const ParamMapModel& model, const ConjugacyChain& chain,
                              std::span<const double> xi, int points_per_axis) {
  const int n = model.dim();
  const UniformGrid grid{n, points_per_axis};
  const std::vector<double> omega = model.freq(xi);
  const std::vector<double> phi = GridPoints(grid);
  std::vector<double> theta(n), f(n), shifted(n), lhs(n);
  double worst = 0.0;
  for (int p = 0; p < grid.num_points(); ++p) {
    const std::span<const double> x(phi.data() + static_cast<size_t>(p) * n, n);
    chain.MapAngles(x, theta);
    model.perturbation(theta, xi, f);
    for (int a = 0; a < n; ++a) shifted[a] = x[a] + model.q[a];
    chain.MapAngles(shifted, lhs);
    for (int a = 0; a < n; ++a) {
      const double rhs = theta[a] + omega[a] + model.epsilon * f[a];
      worst = std::max(worst, std::abs(lhs[a] - rhs));
    }
  }
  return worst;
}

ParamResult ParamKamRun(const ParamMapModel& model, const EngineConfig& config) {
  ParamIterationState state = ParamInitialState(model);
  const int n = model.dim();
  if (config.check_diophantine) {
    const DivisorReport dr = CheckDiophantine(model.q, config.diophantine);
    if (!dr.satisfied) {
      throw KamError(ErrorKind::kNotDiophantine,
                     "target frequency fails the Diophantine check (worst value " +
                         FormatDouble(dr.worst_value) + ")");
    }
  }
  ScheduleParams sp = config.schedule;
  sp.epsilon = std::clamp(model.epsilon, 1e-16, 0.5);
  sp.n = n;
  sp.m = model.param_dim();
  sp.h0 = model.h0;
  ParamResult result;
  result.schedule = ScheduleInit(sp, config.max_steps + 2);

  DivergenceGuard guard;
  try {
    for (int step = 0; step <= config.max_steps; ++step) {
      if (step == config.max_steps) {
        // Record the final norm without taking another step.
        const StepGrid sg = MakeStepGrid(result.schedule, state.nu, n, config);
        const std::vector<double> s =
            ParamConjugatedSamples(model, state.chain, state.xi_nu, sg.grid);
        StepMetrics m;
        m.nu = state.nu;
        m.cutoff = sg.cutoff;
        m.f_norm_grid = MaxAbs(s);
        m.shift_sum = state.metrics.empty() ? 0.0 : state.metrics.back().shift_sum;
        state.metrics.push_back(m);
        if (m.f_norm_grid < config.tol) state.converged = true;
        break;
      }
      state = ParamKamStep(state, model, result.schedule, config);
      guard.Observe(state.f_norm);
      if (state.converged) break;
    }
    result.status = state.converged ? RunStatus::kConverged : RunStatus::kMaxSteps;
  } catch (const KamError& e) {
    if (e.kind() != ErrorKind::kDivergenceDetected &&
        e.kind() != ErrorKind::kInversionFailure) {
      throw;
    }
    result.status = RunStatus::kDiverged;
    // A failed inversion is reported as a divergence, keeping the cause.
    result.diagnostic = e.kind() == ErrorKind::kDivergenceDetected
                            ? e.what()
                            : std::string(ErrorKindName(ErrorKind::kDivergenceDetected)) + ": " + e.what();
  }
  result.converged = result.status == RunStatus::kConverged;
  result.xi_inf = state.xi_nu;
  result.metrics = state.metrics;
  result.chain = state.chain;
  if (result.status != RunStatus::kDiverged) {
    int per_axis = config.residual_grid;
    if (n > 1) {
      per_axis = static_cast<int>(std::ceil(std::pow(config.residual_grid, 1.0 / n)));
    }
    result.conjugacy_residual =
        ParamConjugacyResidual(model, result.chain, result.xi_inf, per_axis);
    const StepGrid sg = MakeStepGrid(result.schedule, state.nu, n, config);
    result.frequency_residual = SupNorm(ComponentMeans(
        ParamConjugatedSamples(model, result.chain, result.xi_inf, sg.grid), n));
    if (result.converged && result.frequency_residual > config.freq_tol) {
      result.diagnostic = "final frequency residual " +
                          FormatDouble(result.frequency_residual) + " exceeds freq_tol";
    }
  }
  return result;
}

std::string ParamMetricsCsv(const std::vector<StepMetrics>& metrics) {
  std::string out = "nu,K,f_norm_grid,f_norm_coeff,xi_shift,freq_residual\n";
  for (const StepMetrics& m : metrics) {
    out += std::to_string(m.nu) + "," + std::to_string(m.cutoff) + "," +
           FormatDouble(m.f_norm_grid) + "," + FormatDouble(m.f_norm_coeff) + "," +
           FormatDouble(m.shift) + "," + FormatDouble(m.freq_residual) + "\n";
  }
  return out;
}

}  // namespace kamforge
