#include "kamforge/kam_twist.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

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

struct SliceSamples {
  std::vector<double> a;
  std::vector<double> b;
};

// Displacements on the graph s = slice(phi); `actions` holds n values per point.
SliceSamples SampleSlice(const TwistMapModel& model, const ConjugacyChain& chain,
                         std::span<const double> rotation, std::span<const double> phi,
                         std::span<const double> actions) {
  const int n = model.dim();
  SliceSamples out;
  out.a.resize(phi.size());
  out.b.resize(phi.size());
  const size_t points = phi.size() / n;
  for (size_t p = 0; p < points; ++p) {
    TwistConjugatedDisplacement(model, chain, rotation, phi.subspan(p * n, n),
                                actions.subspan(p * n, n),
                                std::span<double>(out.a.data() + p * n, n),
                                std::span<double>(out.b.data() + p * n, n));
  }
  return out;
}

// Constant slice r plus optional graph offset V(phi).
std::vector<double> SliceActions(std::span<const double> phi, int n,
                                 std::span<const double> r, const FourierSeries* v) {
  std::vector<double> s(phi.size());
  const size_t points = phi.size() / n;
  std::vector<double> val(n, 0.0);
  for (size_t p = 0; p < points; ++p) {
    if (v) v->EvaluateReal(phi.subspan(p * n, n), val);
    for (int a = 0; a < n; ++a) s[p * n + a] = r[a] + val[a];
  }
  return s;
}

void ValidateModel(const TwistMapModel& model) {
  const int n = model.dim();
  if (n < 1 || model.freq.domain_dim != n || !model.freq.eval) {
    throw KamError(ErrorKind::kInvalidArgument, "twist model needs omega: R^n -> R^n");
  }
  if (!model.displacement && (!model.f_pert || !model.g_pert)) {
    throw KamError(ErrorKind::kInvalidArgument, "twist model has no perturbation");
  }
  if (static_cast<int>(model.r_star.size()) != n || static_cast<int>(model.p.size()) != n) {
    throw KamError(ErrorKind::kInvalidArgument, "base action or target has wrong size");
  }
  if (!(model.epsilon >= 0.0)) {
    throw KamError(ErrorKind::kInvalidArgument, "epsilon must be nonnegative");
  }
}

}  // namespace

void TwistMapModel::Displace(std::span<const double> theta, std::span<const double> r,
                             std::span<double> dtheta, std::span<double> dr) const {
  if (displacement) {
    displacement(theta, r, dtheta, dr);
    return;
  }
  const int n = dim();
  const std::vector<double> omega = freq(r);
  f_pert(theta, r, dtheta);
  g_pert(theta, r, dr);
  for (int a = 0; a < n; ++a) {
    dtheta[a] = omega[a] + epsilon * dtheta[a];
    dr[a] = epsilon * dr[a];
  }
}

void TwistConjugatedDisplacement(const TwistMapModel& model, const ConjugacyChain& chain,
                                 std::span<const double> rotation,
                                 std::span<const double> phi, std::span<const double> s,
                                 std::span<double> a, std::span<double> b) {
  const int n = model.dim();
  double theta[4], r[4], dt[4], dr[4], phi1[4], s1[4];
  chain.MapPoint(phi, s, std::span<double>(theta, n), std::span<double>(r, n));
  model.Displace(std::span<const double>(theta, n), std::span<const double>(r, n),
                 std::span<double>(dt, n), std::span<double>(dr, n));
  for (int i = 0; i < n; ++i) {
    theta[i] += dt[i];
    r[i] += dr[i];
  }
  chain.InvertPoint(std::span<const double>(theta, n), std::span<const double>(r, n),
                    std::span<double>(phi1, n), std::span<double>(s1, n));
  for (int i = 0; i < n; ++i) {
    a[i] = phi1[i] - phi[i] - rotation[i];
    b[i] = s1[i] - s[i];
  }
}

TwistIterationState TwistInitialState(const TwistMapModel& model) {
  ValidateModel(model);
  if (model.dim() > 4) {
    throw KamError(ErrorKind::kInvalidArgument, "twist engine supports n <= 4");
  }
  TwistIterationState state;
  state.r_hat = model.r_star;
  state.rotation = model.p;
  state.chain = ConjugacyChain(model.dim());
  return state;
}

double IntersectionMargin(const TwistMapModel& model, const ConjugacyChain& chain,
                          std::span<const double> rotation, const UniformGrid& grid,
                          std::span<const double> center, double half_width, int nodes) {
  const int n = model.dim();
  const std::vector<double> phi = GridPoints(grid);
  double margin = std::numeric_limits<double>::infinity();
  std::vector<double> r(center.begin(), center.end());
  for (int axis = 0; axis < n; ++axis) {
    for (int j = 0; j < nodes; ++j) {
      const double x = std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * nodes));
      std::copy(center.begin(), center.end(), r.begin());
      r[axis] += half_width * x;
      const SliceSamples s =
          SampleSlice(model, chain, rotation, phi, SliceActions(phi, n, r, nullptr));
      for (int c = 0; c < n; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (size_t p = c; p < s.b.size(); p += n) {
          lo = std::min(lo, s.b[p]);
          hi = std::max(hi, s.b[p]);
        }
        margin = std::min(margin, std::min(hi, -lo));
      }
    }
  }
  return margin;
}

TwistIterationState TwistKamStep(const TwistIterationState& state,
                                 const TwistMapModel& model,
                                 const KamSchedule& schedule,
                                 const EngineConfig& config) {
  const int n = model.dim();
  const int nu = state.nu;
  TwistIterationState next = state;
  StepGrid sg = MakeStepGrid(schedule, nu, n, config);
  std::vector<double> phi;
  SliceSamples cur;
  // Raise the cutoff while the discarded band is above the stopping tolerance.
  for (;;) {
    phi = GridPoints(sg.grid);
    cur = SampleSlice(model, state.chain, state.rotation, phi,
                      SliceActions(phi, n, state.r_hat, nullptr));
    if (!std::isfinite(MaxAbs(cur.a) + MaxAbs(cur.b))) break;
    next.f_nu = AnalyzeReal(sg.grid, n, cur.a, sg.analysis_cutoff);
    next.g_nu = AnalyzeReal(sg.grid, n, cur.b, sg.analysis_cutoff);
    const double tail = BandTail(next.f_nu, sg.cutoff) + BandTail(next.g_nu, sg.cutoff);
    if (tail <= 0.1 * config.tol) break;
    if (!RefineStepGrid(sg, config)) break;
  }
  StepMetrics m;
  m.nu = nu;
  m.cutoff = sg.cutoff;
  m.f_norm_grid = MaxAbs(cur.a);
  m.g_norm_grid = MaxAbs(cur.b);
  if (!std::isfinite(m.f_norm_grid + m.g_norm_grid)) {
    throw KamError(ErrorKind::kDivergenceDetected, "non-finite perturbation samples");
  }
  m.f_norm_coeff = StripNorm(next.f_nu.WithCutoff(sg.cutoff), schedule.h[nu],
                             StripNormFlavor::kCoeffWeighted);
  m.g_norm_coeff = StripNorm(next.g_nu.WithCutoff(sg.cutoff), schedule.h[nu],
                             StripNormFlavor::kCoeffWeighted);
  m.mean_norm = SupNorm(ComponentMeans(cur.a, n));
  m.shift_sum = state.shift_sum;
  m.intersection_margin = state.metrics.empty() ? 0.0 : state.metrics.back().intersection_margin;
  next.norm = m.f_norm_grid + m.g_norm_grid;
  if (!std::isfinite(next.norm)) {
    throw KamError(ErrorKind::kDivergenceDetected, "non-finite perturbation samples");
  }
  if (next.norm < config.tol) {
    next.converged = true;
    next.metrics.push_back(m);
    return next;
  }

  // Action correction from the oscillating part of g.
  const Truncation tg = Truncate(next.g_nu, sg.cutoff, schedule.h[nu + 1]);
  FourierSeries v = TrimSeries(SolveHomological(tg.truncated, state.rotation, config.guard));

  // Frequency equation on the corrected graph.
  std::vector<double> r_new = state.r_hat;
  double residual = 0.0;
  if (!config.ablate_translation) {
    const DriftFn drift = [&](std::span<const double> r) {
      const SliceSamples s = SampleSlice(model, state.chain, state.rotation, phi,
                                         SliceActions(phi, n, r, &v));
      std::vector<double> d = ComponentMeans(s.a, n);
      const std::vector<double> omega = model.freq(r);
      for (int a = 0; a < n; ++a) d[a] += state.rotation[a] - omega[a];
      return d;
    };
    const FrequencySolution sol = SolveFrequencyEquation(
        model.freq, drift, model.p, state.r_hat, config.trust_radius, config.freq_tol);
    r_new = sol.x;
    residual = sol.residual;
  }

  const SliceSamples tilde = SampleSlice(model, state.chain, state.rotation, phi,
                                         SliceActions(phi, n, r_new, &v));
  const FourierSeries f_tilde = AnalyzeReal(sg.grid, n, tilde.a, sg.analysis_cutoff);
  const Truncation tf = Truncate(f_tilde, sg.cutoff, schedule.h[nu + 1]);
  if (config.ablate_translation) {
    for (int a = 0; a < n; ++a) next.rotation[a] += tf.mean[a].real();
    residual = 0.0;
  }
  FourierSeries u = TrimSeries(SolveHomological(tf.truncated, next.rotation, config.guard));
  m.transform_norm = std::max(StripNorm(u, 0.0, StripNormFlavor::kGridSup),
                              StripNorm(v, 0.0, StripNormFlavor::kGridSup));

  std::vector<double> shift(n);
  for (int a = 0; a < n; ++a) shift[a] = r_new[a] - state.r_hat[a];
  m.shift = SupNorm(shift);
  next.shift_sum += m.shift;
  m.shift_sum = next.shift_sum;
  m.freq_residual = residual;
  {
    const std::vector<double> omega = model.freq(r_new);
    double d = 0.0;
    for (int a = 0; a < n; ++a) d = std::max(d, std::abs(omega[a] - model.p[a]));
    m.drift_norm = d;
  }
  next.chain.Append(std::move(u), std::move(v), r_new);
  next.chain.translations().Append(nu, shift, next.norm, residual);
  next.r_hat = r_new;

  if (model.intersection) {
    const double half = 2.0 * schedule.s[nu];
    m.intersection_margin =
        IntersectionMargin(model, next.chain, next.rotation, sg.grid, r_new, half);
    const double noise = 1e-11 * (1.0 + SupNorm(r_new) + half);
    if (m.intersection_margin < -noise) {
      next.metrics.push_back(m);
      throw KamError(ErrorKind::kIntersectionLost,
                     "action displacement does not change sign on some circle (margin " +
                         FormatDouble(m.intersection_margin) + ")");
    }
  }
  next.metrics.push_back(m);
  next.nu = nu + 1;
  return next;
}

double TwistConjugacyResidual(const TwistMapModel& model, const ConjugacyChain& chain,
                              std::span<const double> r_hat,
                              std::span<const double> rotation, int points_per_axis) {
  const int n = model.dim();
  const UniformGrid grid{n, points_per_axis};
  const std::vector<double> phi = GridPoints(grid);
  double theta[4], r[4], dt[4], dr[4], shifted[4], lt[4], lr[4];
  double worst = 0.0;
  for (int p = 0; p < grid.num_points(); ++p) {
    const std::span<const double> x(phi.data() + static_cast<size_t>(p) * n, n);
    chain.MapPoint(x, r_hat, std::span<double>(theta, n), std::span<double>(r, n));
    model.Displace(std::span<const double>(theta, n), std::span<const double>(r, n),
                   std::span<double>(dt, n), std::span<double>(dr, n));
    for (int a = 0; a < n; ++a) shifted[a] = x[a] + rotation[a];
    chain.MapPoint(std::span<const double>(shifted, n), r_hat, std::span<double>(lt, n),
                   std::span<double>(lr, n));
    for (int a = 0; a < n; ++a) {
      worst = std::max(worst, std::abs(lt[a] - (theta[a] + dt[a])));
      worst = std::max(worst, std::abs(lr[a] - (r[a] + dr[a])));
    }
  }
  return worst;
}

TwistResult TwistKamRun(const TwistMapModel& model, const EngineConfig& config) {
  TwistIterationState state = TwistInitialState(model);
  const int n = model.dim();
  TwistResult result;
  if (n == 1) {
    result.degree = Degree1d(model.freq, model.freq.region.lo[0], model.freq.region.hi[0],
                             model.p[0]);
  } else if (n == 2) {
    result.degree = Degree2d(model.freq, model.freq.region, model.p);
  } else {
    result.degree = 1;  // not certified for n > 2
  }
  if (result.degree == 0) {
    throw KamError(ErrorKind::kNoRootInRegion, "degree of omega - p on the region is zero");
  }
  if (config.check_diophantine) {
    const DivisorReport dr = CheckDiophantine(model.p, config.diophantine);
    if (!dr.satisfied) {
      throw KamError(ErrorKind::kNotDiophantine,
                     "target frequency fails the Diophantine check (worst value " +
                         FormatDouble(dr.worst_value) + ")");
    }
  }
  ScheduleParams sp = config.schedule;
  sp.epsilon = std::clamp(model.epsilon, 1e-16, 0.5);
  sp.n = n;
  sp.m = n;
  result.schedule = ScheduleInit(sp, config.max_steps + 2);

  DivergenceGuard guard;
  try {
    for (int step = 0; step <= config.max_steps; ++step) {
      if (step == config.max_steps) {
        const StepGrid sg = MakeStepGrid(result.schedule, state.nu, n, config);
        const std::vector<double> phi = GridPoints(sg.grid);
        const SliceSamples s = SampleSlice(model, state.chain, state.rotation, phi,
                                           SliceActions(phi, n, state.r_hat, nullptr));
        StepMetrics m;
        m.nu = state.nu;
        m.cutoff = sg.cutoff;
        m.f_norm_grid = MaxAbs(s.a);
        m.g_norm_grid = MaxAbs(s.b);
        m.shift_sum = state.shift_sum;
        state.metrics.push_back(m);
        if (m.f_norm_grid + m.g_norm_grid < config.tol) state.converged = true;
        break;
      }
      state = TwistKamStep(state, model, result.schedule, config);
      guard.Observe(state.norm);
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
  result.r_hat_inf = state.r_hat;
  result.rotation = state.rotation;
  result.shift_sum = state.shift_sum;
  result.r_tilde.resize(n);
  for (int a = 0; a < n; ++a) result.r_tilde[a] = state.r_hat[a] - model.r_star[a];
  result.metrics = state.metrics;
  result.chain = state.chain;
  if (result.status != RunStatus::kDiverged) {
    int per_axis = config.residual_grid;
    if (n > 1) {
      per_axis = static_cast<int>(std::ceil(std::pow(config.residual_grid, 1.0 / n)));
    }
    result.conjugacy_residual = TwistConjugacyResidual(model, result.chain, result.r_hat_inf,
                                                       result.rotation, per_axis);
    const StepGrid sg = MakeStepGrid(result.schedule, state.nu, n, config);
    const std::vector<double> phi = GridPoints(sg.grid);
    const SliceSamples s = SampleSlice(model, result.chain, result.rotation, phi,
                                       SliceActions(phi, n, result.r_hat_inf, nullptr));
    result.frequency_residual = SupNorm(ComponentMeans(s.a, n));
    if (result.converged && !config.ablate_translation &&
        result.frequency_residual > config.freq_tol) {
      result.diagnostic = "final frequency residual " +
                          FormatDouble(result.frequency_residual) + " exceeds freq_tol";
    }
  }
  return result;
}

std::string TwistMetricsCsv(const std::vector<StepMetrics>& metrics) {
  std::string out =
      "nu,K,f_norm_grid,f_norm_coeff,freq_residual,g_norm,r_shift,shift_sum,"
      "intersection_margin\n";
  for (const StepMetrics& m : metrics) {
    out += std::to_string(m.nu) + "," + std::to_string(m.cutoff) + "," +
           FormatDouble(m.f_norm_grid) + "," + FormatDouble(m.f_norm_coeff) + "," +
           FormatDouble(m.freq_residual) + "," + FormatDouble(m.g_norm_grid) + "," +
           FormatDouble(m.shift) + "," + FormatDouble(m.shift_sum) + "," +
           FormatDouble(m.intersection_margin) + "\n";
  }
  return out;
}

}  // namespace kamforge
