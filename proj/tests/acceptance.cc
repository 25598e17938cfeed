// Acceptance suite: one PASS/FAIL line per criterion. Detail lines are
// indented. Exits 0 when every criterion was evaluated; pass --strict to
// exit 1 when any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kamforge/diagnostics.h"
#include "kamforge/errors.h"
#include "kamforge/frequency_solver.h"
#include "kamforge/kam_param.h"
#include "kamforge/kam_twist.h"
#include "kamforge/small_divisors.h"
#include "kamforge/testbed.h"

namespace kamforge {
namespace {

namespace fs = std::filesystem;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tolerances.
constexpr double kTol = 1e-12;
constexpr double kHomologicalRel = 1e-10;
constexpr double kHomologicalSeconds = 10.0;
constexpr double kRotationTol = 1e-9;
constexpr long kRotationIters = 1000000;
constexpr double kAblationDrift = 1e-6;
constexpr double kRotationSeconds = 120.0;
constexpr double kConjugacyTol = 10.0 * kTol;
constexpr double kFrequencyTol = kTol;
constexpr double kMinOrder = 1.5;
constexpr double kSlope = 1.0, kSlopeTol = 0.3;
constexpr double kWeakFrequencyTol = 1e-8;
constexpr double kHolderMax = 0.05;
constexpr double kRangeTol = 1e-10;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;
bool g_quiet = false;

void Detail(const char* fmt, auto... args) {
  if (g_quiet) return;
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

void Verdict(int id, const std::string& title, bool pass, const std::string& summary) {
  if (g_quiet) return;
  std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), summary.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// Direct sum of c_k e^{i<k,x>}; does not use the library evaluators.
double DirectSum(const FourierSeries& f, std::span<const double> x) {
  std::complex<double> s = 0.0;
  for (int i = 0; i < f.num_modes(); ++i) {
    double phase = 0.0;
    const auto k = f.mode(i);
    for (size_t a = 0; a < x.size(); ++a) phase += k[a] * x[a];
    s += f.coeff(i) * std::polar(1.0, phase);
  }
  return s.real();
}

// Orbit-averaged rotation number of the model started on the image of
// phi = 0 under the chain at action r_hat.
RotationEstimate OrbitRotation(const TwistMapModel& model, const ConjugacyChain& chain,
                               double r_hat) {
  const double phi[] = {0.0}, s[] = {r_hat};
  double theta[1], r[1];
  chain.MapPoint(phi, s, theta, r);
  const OrbitStep step = [&model](double& t, double& a) {
    double dt, da;
    const double tt[] = {t}, aa[] = {a};
    model.Displace(tt, aa, std::span<double>(&dt, 1), std::span<double>(&da, 1));
    t = std::fmod(t + dt, kTwoPi);
    if (t < 0) t += kTwoPi;
    a += da;
    return dt;
  };
  return RotationNumber(step, std::fmod(theta[0], kTwoPi), r[0], kRotationIters);
}

// A converged or failed engine run kept for the cross-cutting criteria.
struct RunRecord {
  std::string name;
  bool converged = false;
  std::vector<StepMetrics> metrics;
  std::vector<double> norms;
  TranslationLedger ledger;
  std::vector<double> schedule_mu;
  double conjugacy_residual = 0.0;
  double frequency_residual = 0.0;
};

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  void Write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name, std::ios::binary) << text;
  }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
};

RunRecord Record(const std::string& name, const TwistResult& r, const KamSchedule& sched,
                 Artifacts& out) {
  RunRecord rec;
  rec.name = name;
  rec.converged = r.converged;
  rec.metrics = r.metrics;
  for (const StepMetrics& m : r.metrics) rec.norms.push_back(m.f_norm_grid + m.g_norm_grid);
  rec.ledger = r.chain.translations();
  rec.schedule_mu = sched.mu;
  rec.conjugacy_residual = r.conjugacy_residual;
  rec.frequency_residual = r.frequency_residual;
  out.Write(name + "_steps.csv", TwistMetricsCsv(r.metrics));
  out.Write(name + "_ledger.csv", r.chain.translations().ToCsv());
  out.Write(name + "_report.csv", HypothesisReport(sched, r.metrics, EngineKind::kTwist).ToCsv());
  return rec;
}

RunRecord Record(const std::string& name, const ParamResult& r, Artifacts& out) {
  RunRecord rec;
  rec.name = name;
  rec.converged = r.converged;
  rec.metrics = r.metrics;
  for (const StepMetrics& m : r.metrics) rec.norms.push_back(m.f_norm_grid);
  rec.ledger = r.chain.translations();
  rec.schedule_mu = r.schedule.mu;
  rec.conjugacy_residual = r.conjugacy_residual;
  rec.frequency_residual = r.frequency_residual;
  out.Write(name + "_steps.csv", ParamMetricsCsv(r.metrics));
  out.Write(name + "_ledger.csv", r.chain.translations().ToCsv());
  out.Write(name + "_report.csv",
            HypothesisReport(r.schedule, r.metrics, EngineKind::kParam).ToCsv());
  return rec;
}

struct SuiteState {
  std::map<std::string, RunRecord> runs;
  std::map<std::string, TwistResult> twist;
  std::map<std::string, ParamResult> param;
};

TwistResult RunTwist(SuiteState& st, Artifacts& out, const std::string& name,
                     const TwistMapModel& model, EngineConfig config = {}) {
  config.tol = kTol;
  const TwistResult r = TwistKamRun(model, config);
  st.runs[name] = Record(name, r, r.schedule, out);
  st.twist[name] = r;
  return r;
}

ParamResult RunParam(SuiteState& st, Artifacts& out, const std::string& name,
                     const ParamMapModel& model, EngineConfig config = {}) {
  config.tol = kTol;
  const ParamResult r = ParamKamRun(model, config);
  st.runs[name] = Record(name, r, out);
  st.param[name] = r;
  return r;
}

// Engine runs shared by several criteria; everything written here is
// compared byte for byte across two passes.
SuiteState RunEngines(Artifacts& out) {
  SuiteState st;
  const double p = GoldenFrequency();
  for (double eps : {1e-5, 1e-4, 0.05, 0.1, 0.5}) {
    RunTwist(st, out, Fmt("standard_%g", eps), StandardFamily(eps, p));
  }
  {
    EngineConfig ablate;
    ablate.ablate_translation = true;
    RunTwist(st, out, "standard_1e-04_ablated", StandardFamily(1e-4, p), ablate);
    RunTwist(st, out, "twist_drift_1e-04_ablated", TwistDriftFamily(1e-4, p), ablate);
  }
  for (double eps : {1e-6, 1e-5, 1e-4}) {
    RunTwist(st, out, Fmt("twist_drift_%g", eps), TwistDriftFamily(eps, p));
  }
  RunTwist(st, out, "monotone_cubic_1e-4", MonotoneCubicTwist(1e-4, p));
  RunTwist(st, out, "constant_drift_1e-3", ConstantDriftFamily(1e-3, p));
  RunTwist(st, out, "weakly_convex_1e-5", WeaklyConvexTwist(1e-5, p, 3));
  RunParam(st, out, "rotation_golden_1e-4", RotationGoldenFamily(1e-4, p));
  RunParam(st, out, "rotation_zero_mean_1e-3", RotationZeroMeanFamily(1e-3, p));
  RunParam(st, out, "rough_rotation_1e-5", RoughRotationFamily(1e-5, p, 1));
  return st;
}

void Criterion1(Artifacts& out) {
  const auto t0 = Clock::now();
  UniformSource rng(20240611);
  const std::vector<double> w1 = {GoldenFrequency()};
  const std::vector<double> w2 = {GoldenFrequency(), SilverFrequency()};
  double worst_rel = 0.0;
  std::string table = "trial,dim,K,rhs_norm,residual\n";
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    const int kmax = dim == 1 ? 32 : 8;
    const int cutoff = 1 + static_cast<int>(rng.Next() * kmax);
    FourierSeries rhs(dim, 1, cutoff);
    for (int i = 0; i < rhs.num_modes(); ++i) {
      if (i == rhs.ZeroIndex()) continue;
      rhs.set_coeff(i, 0, Complex(rng.Next(-1, 1), rng.Next(-1, 1)));
    }
    rhs.Symmetrize();
    const std::span<const double> w = dim == 1 ? std::span<const double>(w1) : w2;
    const FourierSeries u = SolveHomological(rhs, w);
    const UniformGrid grid{dim, 2 * cutoff + 2};
    double rhs_norm = 0.0, residual = 0.0;
    for (int p = 0; p < grid.num_points(); ++p) {
      double x[2], y[2];
      grid.Point(p, std::span<double>(x, dim));
      for (int a = 0; a < dim; ++a) y[a] = x[a] + w[a];
      const double r = DirectSum(rhs, std::span<const double>(x, dim));
      const double lhs = DirectSum(u, std::span<const double>(y, dim)) -
                         DirectSum(u, std::span<const double>(x, dim));
      rhs_norm = std::max(rhs_norm, std::abs(r));
      residual = std::max(residual, std::abs(lhs - r));
    }
    worst_rel = std::max(worst_rel, residual / rhs_norm);
    table += Fmt("%d,%d,%d,%s,%s\n", trial, dim, cutoff, FormatDouble(rhs_norm).c_str(),
                 FormatDouble(residual).c_str());
  }
  out.Write("homological.csv", table);
  const double secs = Seconds(t0);
  Verdict(1, "homological solver exactness",
          worst_rel <= kHomologicalRel && secs < kHomologicalSeconds,
          Fmt("worst residual/|rhs| = %.3g (<= %.0e), %.2f s (< %.0f s)", worst_rel,
              kHomologicalRel, secs, kHomologicalSeconds));
}

void Criterion2(const SuiteState& st, Artifacts& out) {
  const auto t0 = Clock::now();
  const double p = GoldenFrequency();
  bool pass = true;
  std::string table = "run,converged,rotation_minus_p,uncertainty\n";
  for (double eps : {1e-5, 1e-4}) {
    const std::string name = Fmt("standard_%g", eps);
    const TwistResult& r = st.twist.at(name);
    double drift = NAN;
    if (r.converged) {
      const RotationEstimate est =
          OrbitRotation(StandardFamily(eps, p), r.chain, r.r_hat_inf[0]);
      drift = est.value - p;
      table += name + ",1," + FormatDouble(drift) + "," + FormatDouble(est.uncertainty) + "\n";
    }
    const bool ok = r.converged && std::abs(drift) <= kRotationTol;
    pass = pass && ok;
    Detail("eps=%g: %s, rotation - p = %.3g (|.| <= %.0e)", eps,
           RunStatusName(r.status).c_str(), drift, kRotationTol);
  }
  // Without the translation step the rotation follows the mean angular drift.
  double ablated = NAN;
  {
    const TwistResult& r = st.twist.at("standard_1e-04_ablated");
    if (r.converged) {
      const RotationEstimate est =
          OrbitRotation(StandardFamily(1e-4, p), r.chain, r.r_hat_inf[0]);
      ablated = est.value - p;
      table += "standard_1e-04_ablated,1," + FormatDouble(ablated) + "," +
               FormatDouble(est.uncertainty) + "\n";
    }
    Detail("ablation eps=1e-4: %s, engine drift %.3g, orbit drift %.3g (need > %.0e)",
           RunStatusName(r.status).c_str(), r.rotation[0] - p, ablated, kAblationDrift);
  }
  {
    const TwistResult& r = st.twist.at("twist_drift_1e-04_ablated");
    if (r.converged) {
      const RotationEstimate est =
          OrbitRotation(TwistDriftFamily(1e-4, p), r.chain, r.r_hat_inf[0]);
      table += "twist_drift_1e-04_ablated,1," + FormatDouble(est.value - p) + "," +
               FormatDouble(est.uncertainty) + "\n";
      Detail("info: twist_drift ablation eps=1e-4 orbit drift %.3g", est.value - p);
    }
  }
  out.Write("rotation.csv", table);
  const bool ablation_ok = std::abs(ablated) > kAblationDrift;
  const double secs = Seconds(t0);
  Verdict(2, "frequency preservation", pass && ablation_ok && secs < kRotationSeconds,
          Fmt("rotation within %.0e: %s; ablation drift %.3g > %.0e: %s; %.1f s", kRotationTol,
              pass ? "yes" : "no", ablated, kAblationDrift, ablation_ok ? "yes" : "no", secs));
}

void Criterion3(const SuiteState& st) {
  bool pass = true;
  double worst_conj = 0.0, worst_freq = 0.0;
  for (const char* name : {"standard_1e-05", "standard_0.0001", "twist_drift_0.0001",
                           "monotone_cubic_1e-4", "constant_drift_1e-3",
                           "rotation_golden_1e-4", "rotation_zero_mean_1e-3"}) {
    const RunRecord& r = st.runs.at(name);
    const bool ok = r.converged && r.conjugacy_residual <= kConjugacyTol &&
                    r.frequency_residual <= kFrequencyTol;
    pass = pass && ok;
    worst_conj = std::max(worst_conj, r.conjugacy_residual);
    worst_freq = std::max(worst_freq, r.frequency_residual);
    Detail("%-24s converged=%d conjugacy=%.3g frequency=%.3g", name, r.converged,
           r.conjugacy_residual, r.frequency_residual);
  }
  Verdict(3, "conjugacy equation", pass,
          Fmt("worst conjugacy residual %.3g (<= %.0e), worst frequency residual %.3g", worst_conj,
              kConjugacyTol, worst_freq));
}

void Criterion4(const SuiteState& st) {
  bool pass = true;
  int fitted = 0;
  double worst = INFINITY;
  for (const auto& [name, r] : st.runs) {
    if (!r.converged || r.norms.size() < 4) continue;
    double order = NAN;
    try {
      // The norm that triggered the stop sits on the rounding floor.
      order = FitConvergenceOrder(r.norms, kTol);
    } catch (const KamError&) {
      Detail("%-24s %zu steps, fewer than three norms above tol", name.c_str(),
             r.norms.size());
      continue;
    }
    ++fitted;
    worst = std::min(worst, order);
    pass = pass && order >= kMinOrder;
    Detail("%-24s %zu steps, order %.3f", name.c_str(), r.norms.size(), order);
  }
  pass = pass && fitted > 0;
  Verdict(4, "superlinear contraction", pass,
          Fmt("%d runs fitted, minimum order %.3f (>= %.1f)", fitted, worst, kMinOrder));
}

void Criterion5(const SuiteState& st) {
  std::vector<double> lx, ly;
  bool converged = true;
  for (double eps : {1e-6, 1e-5, 1e-4}) {
    const TwistResult& r = st.twist.at(Fmt("twist_drift_%g", eps));
    converged = converged && r.converged;
    Detail("eps=%g r_tilde=%.6g", eps, r.r_tilde[0]);
    lx.push_back(std::log(eps));
    ly.push_back(std::log(std::abs(r.r_tilde[0])));
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / lx.size();
    my += ly[i] / ly.size();
  }
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  const bool pass = converged && std::abs(slope - kSlope) <= kSlopeTol;
  Verdict(5, "translation smallness", pass,
          Fmt("slope of log|r_tilde| vs log eps = %.4f (%.1f +- %.1f)", slope, kSlope, kSlopeTol));
}

void Criterion6(const SuiteState& st) {
  bool pass = true;
  int checked = 0;
  double worst = 0.0;
  for (const auto& [name, r] : st.runs) {
    if (!r.converged) continue;
    ++checked;
    // Run constant c with |shift_nu| <= c |f_nu|.
    const CauchyReport proxy = CauchyMonitor(r.ledger);
    // Monitor against the schedule scales mu_nu.
    std::vector<double> mu(r.schedule_mu.begin(),
                           r.schedule_mu.begin() + r.ledger.steps().size());
    const CauchyReport monitor = CauchyMonitor(r.ledger, mu);
    const bool ok = std::isfinite(proxy.max_ratio) && !monitor.flagged;
    pass = pass && ok;
    worst = std::max(worst, proxy.max_ratio);
    const std::string note =
        proxy.flagged ? "  (info: shift/|f| rose 10x at step " +
                            std::to_string(proxy.flagged_step) + ")"
                      : "";
    Detail("%-26s c = %-10.4g schedule ratio max %-10.4g monitor %s%s", name.c_str(),
           proxy.max_ratio, monitor.max_ratio, monitor.flagged ? "FLAG" : "ok", note.c_str());
  }
  Verdict(6, "Cauchy ledger", pass && checked > 0,
          Fmt("%d converged runs, all run constants finite (max %.4g), monitor flags: %s",
              checked, worst, pass ? "none" : "raised"));
}

void Criterion7(const SuiteState& st) {
  const TwistResult& r = st.twist.at("weakly_convex_1e-5");
  const TwistMapModel model = WeaklyConvexTwist(1e-5, GoldenFrequency(), 3);
  // The lower gauge must be x^3 / 4 and must bound the increments of omega.
  const double x = 0.3;
  const bool gauge_ok = std::abs(model.freq.modulus_lower(x) - x * x * x / 4) <= 1e-15;
  const bool pass = r.converged && r.frequency_residual <= kWeakFrequencyTol && gauge_ok;
  Detail("status %s, steps %zu, r_tilde %.6g, gauge(0.3) = %.6g", RunStatusName(r.status).c_str(),
         r.metrics.size(), r.r_tilde[0], model.freq.modulus_lower(x));
  Verdict(7, "weak convexity path", pass,
          Fmt("frequency residual %.3g (<= %.0e)", r.frequency_residual, kWeakFrequencyTol));
}

void Criterion8(const SuiteState& st) {
  const RunRecord& r = st.runs.at("rough_rotation_1e-5");
  const NowhereHolderField field(1, 1.0);
  const double xi = GoldenFrequency();
  const double alpha = EstimateHolderExponent([&](double v) { return field(v); }, xi, 4, 20,
                                              256, 3);
  const bool pass = r.converged && r.conjugacy_residual <= kConjugacyTol &&
                    r.frequency_residual <= kFrequencyTol && alpha < kHolderMax;
  Detail("status %s, steps %zu, conjugacy %.3g, frequency %.3g",
         r.converged ? "converged" : "not converged", r.metrics.size(), r.conjugacy_residual,
         r.frequency_residual);
  Verdict(8, "weak parameter regularity", pass,
          Fmt("Holder exponent over 2^-4..2^-20 = %.4f (< %.2f)", alpha, kHolderMax));
}

// min |omega - p| over the boundary of the box.
double BoundaryMargin(const FrequencyCase& fc) {
  auto gap = [&](std::span<const double> x) {
    const std::vector<double> v = fc.map(x);
    double s = 0.0;
    for (size_t a = 0; a < v.size(); ++a) s += (v[a] - fc.p[a]) * (v[a] - fc.p[a]);
    return std::sqrt(s);
  };
  if (fc.map.domain_dim == 1) {
    const double a[] = {fc.box.lo[0]}, b[] = {fc.box.hi[0]};
    return std::min(gap(a), gap(b));
  }
  double m = INFINITY;
  const int n = 1024;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double x = fc.box.lo[0] + t * (fc.box.hi[0] - fc.box.lo[0]);
    const double y = fc.box.lo[1] + t * (fc.box.hi[1] - fc.box.lo[1]);
    for (const auto& pt : {std::array{x, fc.box.lo[1]}, std::array{x, fc.box.hi[1]},
                           std::array{fc.box.lo[0], y}, std::array{fc.box.hi[0], y}}) {
      m = std::min(m, gap(pt));
    }
  }
  return m;
}

void Criterion9() {
  const ModelOverrides o;
  bool facts_ok = true, invariance_ok = true;
  UniformSource rng(909);
  int drifts = 0;
  for (const char* name :
       {"identity_1d", "reversed_1d", "square_1d", "identity_2d", "complex_square"}) {
    const MapCatalogEntry& e = FindCatalogEntry(name);
    const FrequencyCase fc = e.frequency(o);
    auto degree = [&](const FrequencyMap& m) {
      return fc.map.domain_dim == 1 ? Degree1d(m, fc.box.lo[0], fc.box.hi[0], fc.p[0])
                                    : Degree2d(m, fc.box, fc.p);
    };
    const int d = degree(fc.map);
    facts_ok = facts_ok && d == *e.facts.degree;
    // Drifts with sup-norm at most half the boundary margin.
    const double margin = BoundaryMargin(fc);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial, ++drifts) {
      const int m = fc.map.range_dim;
      std::vector<double> amp(3 * m), freq(3 * m), phase(3 * m);
      for (int j = 0; j < 3 * m; ++j) {
        amp[j] = rng.Next(0, 1);
        freq[j] = rng.Next(0.5, 6);
        phase[j] = rng.Next(0, kTwoPi);
      }
      double total = 0.0;
      for (int c = 0; c < m; ++c) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += amp[3 * c + j];
        total = std::max(total, s);
      }
      // Euclidean sup of the drift is at most sqrt(m) * total * scale.
      const double scale = 0.5 * margin / (std::sqrt(static_cast<double>(m)) * total);
      FrequencyMap drifted = fc.map;
      const VectorFn base = fc.map.eval;
      drifted.eval = [=](std::span<const double> x) {
        std::vector<double> v = base(x);
        double t = 0.0;
        for (size_t a = 0; a < x.size(); ++a) t += (a + 1) * x[a];
        for (int c = 0; c < m; ++c) {
          for (int j = 0; j < 3; ++j) {
            v[c] += scale * amp[3 * c + j] * std::sin(freq[3 * c + j] * t + phase[3 * c + j]);
          }
        }
        return v;
      };
      if (degree(drifted) != d) ++bad;
    }
    invariance_ok = invariance_ok && bad == 0;
    Detail("%-15s degree %2d (expected %2d), boundary margin %.3g, drift mismatches %d", name, d,
           *e.facts.degree, margin, bad);
  }
  Verdict(9, "degree certificates", facts_ok && invariance_ok,
          Fmt("facts reproduced: %s; invariant under %d drifts: %s", facts_ok ? "yes" : "no",
              drifts, invariance_ok ? "yes" : "no"));
}

void Criterion10() {
  const ModelOverrides o;
  const FrequencyCase fc = FindCatalogEntry("line_1to2").frequency(o);
  const DriftFn none = [](std::span<const double>) { return std::vector<double>{0.0, 0.0}; };
  const double start[] = {0.0};
  bool consistent_ok = false;
  double residual = NAN;
  try {
    const FrequencySolution sol = SolveFrequencyRangeMode(fc.map, none, fc.p, start, 1e-14);
    residual = sol.residual;
    consistent_ok = residual <= kRangeTol;
    Detail("consistent target (0.3, 0.6): xi = %.17g, residual %.3g", sol.x[0], residual);
  } catch (const KamError& e) {
    Detail("consistent target raised %s", e.what());
  }
  bool rejected = false;
  const std::vector<double> bad = {0.3, 0.7};
  try {
    const FrequencySolution sol = SolveFrequencyRangeMode(fc.map, none, bad, start, 1e-14);
    Detail("inconsistent target accepted with residual %.3g", sol.residual);
  } catch (const KamError& e) {
    rejected = e.kind() == ErrorKind::kTargetOutsideRange;
    Detail("inconsistent target (0.3, 0.7) rejected: %s", e.what());
  }
  Verdict(10, "dimension-mismatch mode", consistent_ok && rejected,
          Fmt("consistent residual %.3g (<= %.0e), inconsistent rejected: %s", residual, kRangeTol,
              rejected ? "yes" : "no"));
}

std::map<std::string, std::string> ReadCsvs(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files[entry.path().filename().string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

}  // namespace
}  // namespace kamforge

int main(int argc, char** argv) {
  using namespace kamforge;
  CLI::App app{"kamforge acceptance suite"};
  std::string out_dir = "acceptance_out";
  bool strict = false;
  app.add_option("--out", out_dir, "directory for CSV artifacts");
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);

  const fs::path root(out_dir);
  fs::remove_all(root);
  const auto t0 = Clock::now();

  Artifacts first(root / "pass1");
  Criterion1(first);
  const SuiteState st = RunEngines(first);
  Criterion2(st, first);
  Criterion3(st);
  Criterion4(st);
  Criterion5(st);
  Criterion6(st);
  Criterion7(st);
  Criterion8(st);
  Criterion9();
  Criterion10();

  // Second pass: same runs, fresh directory, compare bytes.
  {
    Artifacts second(root / "pass2");
    g_quiet = true;
    Criterion1(second);
    const SuiteState again = RunEngines(second);
    Criterion2(again, second);
    g_quiet = false;

    const auto a = ReadCsvs(first.dir());
    const auto b = ReadCsvs(second.dir());
    int differing = 0;
    for (const auto& [name, text] : a) {
      const auto it = b.find(name);
      if (it == b.end() || it->second != text) {
        ++differing;
        Detail("differs: %s", name.c_str());
      }
    }
    const bool same = differing == 0 && a.size() == b.size() && !a.empty();
    Verdict(11, "determinism", same,
            Fmt("%zu CSV files compared, %d differ", a.size(), differing));
  }

  std::printf("%d of 11 criteria failed, %.1f s total\n", g_failures, Seconds(t0));
  return strict && g_failures > 0 ? 1 : 0;
}
