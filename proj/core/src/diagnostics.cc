#include "kamforge/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "kamforge/errors.h"
#include "kamforge/frequency_solver.h"

namespace kamforge {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

void CompensatedSum::Add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

RotationEstimate RotationNumber(const OrbitStep& step, double theta0, double action0,
                                long iters) {
  if (iters < 16) throw KamError(ErrorKind::kInvalidArgument, "orbit too short");
  std::vector<double> lift(iters + 1);
  double theta = theta0 - kTwoPi * std::floor(theta0 / kTwoPi);
  double action = action0;
  CompensatedSum total;
  lift[0] = 0.0;
  for (long j = 1; j <= iters; ++j) {
    total.Add(step(theta, action));
    theta -= kTwoPi * std::floor(theta / kTwoPi);
    lift[j] = total.value();
  }
  // Average of (S_{j+L} - S_j)/L over j in [0, N-L] with L = N/2.
  const long L = iters / 2;
  CompensatedSum upper, lower;
  for (long j = 0; j + L <= iters; ++j) {
    upper.Add(lift[j + L]);
    lower.Add(lift[j]);
  }
  const double count = static_cast<double>(iters - L + 1);
  RotationEstimate est;
  est.value = (upper.value() - lower.value()) / count / static_cast<double>(L);

  // Eight half-overlapping windows covering the orbit.
  const long width = 2 * iters / 9;
  double mean = 0.0, sq = 0.0;
  double rates[8];
  for (int w = 0; w < 8; ++w) {
    const long start = w * width / 2;
    rates[w] = (lift[start + width] - lift[start]) / static_cast<double>(width);
    mean += rates[w] / 8.0;
  }
  for (double r : rates) sq += (r - mean) * (r - mean);
  est.uncertainty = std::sqrt(sq / 7.0) / std::sqrt(8.0) +
                    4.0 * std::numeric_limits<double>::epsilon() * std::abs(est.value);
  return est;
}

double FitConvergenceOrder(std::span<const double> norms, double floor) {
  std::vector<double> logs;
  for (double v : norms) {
    if (!(v > floor)) break;
    logs.push_back(std::log(v));
  }
  if (logs.size() < 3) {
    throw KamError(ErrorKind::kTooFewPoints, "need at least three norms above the floor");
  }
  const size_t n = logs.size() - 1;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += logs[i] / n;
    my += logs[i + 1] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (logs[i] - mx) * (logs[i + 1] - my);
    sxx += (logs[i] - mx) * (logs[i] - mx);
  }
  if (!(sxx > 0.0)) throw KamError(ErrorKind::kTooFewPoints, "norms are constant");
  return sxy / sxx;
}

ConvergenceReport HypothesisReport(KamSchedule schedule,
                                   const std::vector<StepMetrics>& metrics,
                                   EngineKind kind,
                                   const ModulusOfContinuity& omega_modulus) {
  ConvergenceReport report;
  for (const StepMetrics& m : metrics) {
    report.norms.push_back(kind == EngineKind::kTwist ? m.f_norm_grid + m.g_norm_grid
                                                      : m.f_norm_grid);
  }
  try {
    report.fitted_order = FitConvergenceOrder(report.norms);
    report.order_available = true;
  } catch (const KamError&) {
    report.order_available = false;
  }
  if (metrics.empty()) return report;
  schedule.Extend(static_cast<int>(metrics.size()) + 2);
  const auto& p = schedule.params;
  const double g = std::pow(schedule.gamma0, p.n + p.m + 1);
  for (const StepMetrics& m : metrics) {
    const int nu = m.nu;
    HypothesisCheck c;
    c.nu = nu;
    const double delta = schedule.h[nu] - schedule.h[nu + 1];
    const double delta_next = schedule.h[nu + 1] - schedule.h[nu + 2];
    const double s = schedule.s[nu];
    const double mu = schedule.mu[nu];
    const double Gamma = schedule.Gamma(nu);
    const double sm = std::pow(s, p.m);
    // H1: tail of the truncated Fourier sum.
    c.ratio[0] = TailIntegral(p.n, schedule.K[nu + 1], delta) / mu;
    // H2 / H6: accumulated mean drift against mu_0^{1/2}.
    c.ratio[1] = m.drift_norm / std::sqrt(schedule.mu0);
    c.ratio[5] = c.ratio[1];
    // H3: transformation size against the domain shrinkage.
    c.ratio[2] = g * sm * mu * Gamma / std::min(schedule.s[nu + 1], delta / 4.0);
    // H4: transformation size against the inverse modulus of omega.
    c.ratio[3] = g * sm * mu * Gamma / omega_modulus.Inverse(g * sm * mu * mu);
    // H5: the new perturbation fits the next scale.
    c.ratio[4] = std::ldexp(1.0, p.m) * std::pow(mu, 1.0 - p.rho) *
                 (g * sm / delta_next * Gamma + g * std::pow(s, p.m - 1) * Gamma + 1.0);
    for (int i = 0; i < kNumHypotheses; ++i) {
      c.applicable[i] = true;
      c.holds[i] = c.ratio[i] <= 1.0;
    }
    c.applicable[1] = kind == EngineKind::kTwist;
    c.applicable[5] = kind == EngineKind::kParam;
    report.hypotheses.push_back(c);
  }
  return report;
}

std::string ConvergenceReport::ToJson() const {
  nlohmann::ordered_json j;
  j["status"] = status;
  j["norms"] = norms;
  if (order_available) {
    j["fitted_order"] = fitted_order;
  } else {
    j["fitted_order"] = nullptr;
  }
  j["conjugacy_residual"] = conjugacy_residual;
  j["frequency_residual"] = frequency_residual;
  auto steps = nlohmann::ordered_json::array();
  for (const HypothesisCheck& c : hypotheses) {
    nlohmann::ordered_json s;
    s["nu"] = c.nu;
    for (int i = 0; i < kNumHypotheses; ++i) {
      if (!c.applicable[i]) continue;
      const std::string key = "H" + std::to_string(i + 1);
      s[key] = {{"ratio", c.ratio[i]}, {"holds", c.holds[i]}};
    }
    steps.push_back(s);
  }
  j["hypotheses"] = steps;
  return j.dump(2) + "\n";
}

std::string ConvergenceReport::ToCsv() const {
  std::string out = "nu,norm";
  for (int i = 1; i <= kNumHypotheses; ++i) {
    out += ",H" + std::to_string(i) + "_ratio,H" + std::to_string(i) + "_holds";
  }
  out += "\n";
  for (size_t r = 0; r < hypotheses.size(); ++r) {
    const HypothesisCheck& c = hypotheses[r];
    out += std::to_string(c.nu) + "," + FormatDouble(r < norms.size() ? norms[r] : 0.0);
    for (int i = 0; i < kNumHypotheses; ++i) {
      if (c.applicable[i]) {
        out += "," + FormatDouble(c.ratio[i]) + "," + (c.holds[i] ? "1" : "0");
      } else {
        out += ",,";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace kamforge
