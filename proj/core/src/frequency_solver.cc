#include "kamforge/frequency_solver.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "kamforge/errors.h"

namespace kamforge {
namespace {

constexpr double kPi = std::numbers::pi;

int Sign(double v) { return (v > 0.0) - (v < 0.0); }

// F(x) = omega(x) + drift(x) - target, counting evaluations.
class Residual {
 public:
  Residual(const FrequencyMap& map, const DriftFn& drift, std::span<const double> target)
      : map_(map), drift_(drift), target_(target.begin(), target.end()) {}

  std::vector<double> operator()(std::span<const double> x) {
    ++evaluations;
    std::vector<double> f = map_(x);
    if (f.size() != target_.size()) {
      throw KamError(ErrorKind::kInvalidArgument, "target dimension mismatch");
    }
    if (drift_) {
      const std::vector<double> d = drift_(x);
      for (size_t i = 0; i < f.size(); ++i) f[i] += d[i];
    }
    for (size_t i = 0; i < f.size(); ++i) f[i] -= target_[i];
    return f;
  }

  int evaluations = 0;

 private:
  const FrequencyMap& map_;
  const DriftFn& drift_;
  std::vector<double> target_;
};

double Euclid(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

FrequencySolution Solve1d(Residual& F, const Box& region, double x0, double trust,
                          double tol) {
  auto eval = [&](double x) { return F(std::span<const double>(&x, 1))[0]; };
  const double f0 = eval(x0);
  if (std::abs(f0) <= tol) return {{x0}, std::abs(f0), F.evaluations};
  const double lo = std::max(region.lo[0], x0 - trust);
  const double hi = std::min(region.hi[0], x0 + trust);

  // Outward scan with geometrically growing offsets; the first sign change
  // seen gives the bracket nearest to x0.
  double d = std::max(1e-15 * (1.0 + std::abs(x0)), trust * 0x1.0p-45);
  double prev_plus = x0, prev_minus = x0;
  double f_prev_plus = f0, f_prev_minus = f0;
  double a = 0.0, b = 0.0, fa = 0.0;
  bool bracketed = false;
  bool plus_open = hi > x0, minus_open = lo < x0;
  while ((plus_open || minus_open) && !bracketed) {
    const bool last = d >= trust;
    if (plus_open) {
      const double x = std::min(hi, x0 + d);
      const double fx = eval(x);
      if (std::abs(fx) <= tol) return {{x}, std::abs(fx), F.evaluations};
      if (Sign(fx) != Sign(f0)) {
        a = prev_plus, fa = f_prev_plus, b = x;
        bracketed = true;
        break;
      }
      prev_plus = x, f_prev_plus = fx;
      if (x >= hi) plus_open = false;
    }
    if (minus_open) {
      const double x = std::max(lo, x0 - d);
      const double fx = eval(x);
      if (std::abs(fx) <= tol) return {{x}, std::abs(fx), F.evaluations};
      if (Sign(fx) != Sign(f0)) {
        a = prev_minus, fa = f_prev_minus, b = x;
        bracketed = true;
        break;
      }
      prev_minus = x, f_prev_minus = fx;
      if (x <= lo) minus_open = false;
    }
    if (last) break;
    d = std::min(2.0 * d, trust);
  }
  if (!bracketed) {
    throw KamError(ErrorKind::kNoRootInRegion,
                   "no sign change of omega + drift - target within trust radius");
  }
  double best_x = a, best_f = std::abs(fa);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = eval(mid);
    if (std::abs(fm) < best_f) best_x = mid, best_f = std::abs(fm);
    if (std::abs(fm) <= tol) return {{mid}, std::abs(fm), F.evaluations};
    if (Sign(fm) == Sign(fa)) {
      a = mid, fa = fm;
    } else {
      b = mid;
    }
  }
  if (best_f <= tol) return {{best_x}, best_f, F.evaluations};
  throw KamError(ErrorKind::kToleranceUnreachable,
                 "bisection stalled at residual " + FormatDouble(best_f));
}

Eigen::MatrixXd FiniteDifferenceJacobian(Residual& F, const std::vector<double>& x,
                                         const std::vector<double>& fx) {
  const int m = static_cast<int>(x.size());
  const int n = static_cast<int>(fx.size());
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  const double h = 1e-6 * scale;
  Eigen::MatrixXd J(n, m);
  std::vector<double> xp = x, xm = x;
  for (int j = 0; j < m; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const auto fp = F(xp);
    const auto fm = F(xm);
    for (int i = 0; i < n; ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    xp[j] = xm[j] = x[j];
  }
  return J;
}

// Damped Newton / Gauss-Newton. Returns false if it leaves `bounds` or stalls.
bool Newton(Residual& F, const Box& bounds, std::vector<double>& x, double tol,
            double& residual) {
  std::vector<double> fx = F(x);
  for (int it = 0; it < 60; ++it) {
    residual = SupNorm(fx);
    if (residual <= tol) return true;
    const Eigen::MatrixXd J = FiniteDifferenceJacobian(F, x, fx);
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(fx.data(), fx.size());
    const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(rhs);
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k, lambda *= 0.5) {
      std::vector<double> trial = x;
      for (size_t j = 0; j < x.size(); ++j) trial[j] += lambda * step(j);
      if (!bounds.Contains(trial)) continue;
      const auto ft = F(trial);
      if (Euclid(ft) < Euclid(fx)) {
        x = trial;
        fx = ft;
        improved = true;
        break;
      }
    }
    if (!improved) {
      residual = SupNorm(fx);
      return residual <= tol;
    }
  }
  residual = SupNorm(fx);
  return residual <= tol;
}

Box Intersect(const Box& a, const Box& b) {
  Box out = a;
  for (int i = 0; i < a.dim(); ++i) {
    out.lo[i] = std::max(a.lo[i], b.lo[i]);
    out.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  return out;
}

// Best grid point of |F| over the box, ties broken by distance to start.
std::vector<double> GridScan(Residual& F, const Box& box, int per_axis,
                             std::span<const double> start, double& best_value) {
  const int m = box.dim();
  int total = 1;
  for (int a = 0; a < m; ++a) total *= per_axis;
  std::vector<double> best;
  best_value = std::numeric_limits<double>::infinity();
  double best_dist = std::numeric_limits<double>::infinity();
  std::vector<double> x(m);
  for (int p = 0; p < total; ++p) {
    int rem = p;
    for (int a = m - 1; a >= 0; --a) {
      const int j = rem % per_axis;
      rem /= per_axis;
      x[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * j / (per_axis - 1);
    }
    const double v = Euclid(F(x));
    const double dist = L1Distance(x, start);
    if (v < best_value || (v == best_value && dist < best_dist)) {
      best_value = v;
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int Degree1d(const FrequencyMap& map, double a, double b, double p) {
  auto g = [&](double x) { return map(std::span<const double>(&x, 1))[0] - p; };
  const double ga = g(a), gb = g(b);
  if (std::abs(ga) < 1e-12 || std::abs(gb) < 1e-12) {
    throw KamError(ErrorKind::kBoundaryHit, "omega - p vanishes at an interval endpoint");
  }
  int previous_changes = -1;
  int stable = 0;
  int degree = 0;
  for (int mesh = 64; mesh <= (1 << 20); mesh *= 2) {
    int changes = 0;
    degree = 0;
    int last_sign = Sign(ga);
    for (int i = 1; i <= mesh; ++i) {
      const double x = i == mesh ? b : a + (b - a) * i / mesh;
      const int s = Sign(i == mesh ? gb : g(x));
      if (s == 0) continue;
      if (s != last_sign) {
        ++changes;
        degree += (s - last_sign) / 2;
        last_sign = s;
      }
    }
    stable = changes == previous_changes ? stable + 1 : 0;
    previous_changes = changes;
    if (stable >= 2) break;
  }
  return degree;
}

int Degree2d(const FrequencyMap& map, const Box& box, std::span<const double> p, int mesh) {
  if (box.dim() != 2 || p.size() != 2) {
    throw KamError(ErrorKind::kInvalidArgument, "degree_2d needs a 2d box and target");
  }
  const double corners[5][2] = {{box.lo[0], box.lo[1]},
                                {box.hi[0], box.lo[1]},
                                {box.hi[0], box.hi[1]},
                                {box.lo[0], box.hi[1]},
                                {box.lo[0], box.lo[1]}};
  for (int per_side = std::max(mesh, 4); 4 * per_side <= (1 << 20); per_side *= 2) {
    double total = 0.0;
    double prev_angle = 0.0;
    bool have_prev = false;
    bool too_coarse = false;
    for (int side = 0; side < 4 && !too_coarse; ++side) {
      for (int i = 0; i < per_side; ++i) {
        const double t = static_cast<double>(i) / per_side;
        const double x[2] = {corners[side][0] + t * (corners[side + 1][0] - corners[side][0]),
                             corners[side][1] + t * (corners[side + 1][1] - corners[side][1])};
        const auto w = map(std::span<const double>(x, 2));
        const double u = w[0] - p[0], v = w[1] - p[1];
        if (std::hypot(u, v) < 1e-9) {
          throw KamError(ErrorKind::kBoundaryHit, "target lies on the image of the boundary");
        }
        const double angle = std::atan2(v, u);
        if (have_prev) {
          double delta = angle - prev_angle;
          if (delta > kPi) delta -= 2.0 * kPi;
          if (delta < -kPi) delta += 2.0 * kPi;
          if (std::abs(delta) >= 0.5 * kPi) {
            too_coarse = true;
            break;
          }
          total += delta;
        }
        prev_angle = angle;
        have_prev = true;
      }
    }
    if (too_coarse) continue;
    // close the loop back to the first sample
    const auto w = map(std::span<const double>(corners[0], 2));
    double delta = std::atan2(w[1] - p[1], w[0] - p[0]) - prev_angle;
    if (delta > kPi) delta -= 2.0 * kPi;
    if (delta < -kPi) delta += 2.0 * kPi;
    if (std::abs(delta) >= 0.5 * kPi) continue;
    total += delta;
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
  }
  throw KamError(ErrorKind::kMeshExhausted, "boundary mesh cap reached");
}

FrequencySolution SolveFrequencyEquation(const FrequencyMap& map, const DriftFn& drift,
                                         std::span<const double> target,
                                         std::span<const double> start,
                                         double trust_radius, double tol) {
  if (map.domain_dim != map.range_dim) {
    throw KamError(ErrorKind::kInvalidArgument,
                   "dimension mismatch needs the range-mode solver");
  }
  Residual F(map, drift, target);
  if (map.domain_dim == 1) return Solve1d(F, map.region, start[0], trust_radius, tol);

  const Box trust = Intersect(Box::Around(start, trust_radius), map.region);
  std::vector<double> x(start.begin(), start.end());
  double residual = 0.0;
  if (Newton(F, trust, x, tol, residual)) return {x, residual, F.evaluations};
  double scan_value = 0.0;
  x = GridScan(F, trust, 64, start, scan_value);
  if (x.empty()) throw KamError(ErrorKind::kNoRootInRegion, "empty trust region");
  if (Newton(F, trust, x, tol, residual)) return {x, residual, F.evaluations};
  if (residual < 1e3 * tol) {
    throw KamError(ErrorKind::kToleranceUnreachable,
                   "Newton stalled at residual " + FormatDouble(residual));
  }
  throw KamError(ErrorKind::kNoRootInRegion,
                 "no root within trust radius, best residual " + FormatDouble(residual));
}

FrequencySolution SolveFrequencyRangeMode(const FrequencyMap& map, const DriftFn& drift,
                                          std::span<const double> target,
                                          std::span<const double> start, double tol,
                                          double clearance) {
  Residual F(map, drift, target);
  const int m = map.domain_dim;
  const int per_axis = m == 1 ? 4097 : (m == 2 ? 65 : 17);
  double scan_value = 0.0;
  std::vector<double> x = GridScan(F, map.region, per_axis, start, scan_value);
  double residual = 0.0;
  Newton(F, map.region, x, tol, residual);
  if (residual <= tol) return {x, residual, F.evaluations};
  if (residual > clearance) {
    throw KamError(ErrorKind::kTargetOutsideRange,
                   "best residual " + FormatDouble(residual) + " exceeds clearance");
  }
  throw KamError(ErrorKind::kToleranceUnreachable,
                 "range-mode refinement stalled at residual " + FormatDouble(residual));
}

void TranslationLedger::Append(int nu, std::vector<double> shift, double mu,
                               double residual) {
  if (cumulative_.empty()) cumulative_.assign(shift.size(), 0.0);
  for (size_t i = 0; i < shift.size(); ++i) cumulative_[i] += shift[i];
  LedgerStep step;
  step.nu = nu;
  step.shift_norm = SupNorm(shift);
  step.shift = std::move(shift);
  step.mu = mu;
  step.residual = residual;
  steps_.push_back(std::move(step));
}

std::string TranslationLedger::ToCsv() const {
  const size_t dim = steps_.empty() ? 1 : steps_.front().shift.size();
  std::string out = "nu";
  for (size_t i = 0; i < dim; ++i) out += ",shift_" + std::to_string(i);
  out += ",shift_norm,mu,ratio,residual\n";
  for (const LedgerStep& s : steps_) {
    out += std::to_string(s.nu);
    for (double v : s.shift) out += "," + FormatDouble(v);
    const double ratio = s.mu > 0.0 ? s.shift_norm / s.mu : 0.0;
    out += "," + FormatDouble(s.shift_norm) + "," + FormatDouble(s.mu) + "," +
           FormatDouble(ratio) + "," + FormatDouble(s.residual) + "\n";
  }
  return out;
}

CauchyReport CauchyMonitor(const TranslationLedger& ledger) {
  std::vector<double> mu;
  for (const LedgerStep& s : ledger.steps()) mu.push_back(s.mu);
  return CauchyMonitor(ledger, mu);
}

CauchyReport CauchyMonitor(const TranslationLedger& ledger, std::span<const double> mu) {
  CauchyReport report;
  const auto& steps = ledger.steps();
  for (size_t i = 0; i < steps.size(); ++i) {
    const double shift = steps[i].shift_norm <= kShiftNoiseFloor ? 0.0 : steps[i].shift_norm;
    double ratio = 0.0;
    if (shift > 0.0) {
      ratio = mu[i] > 0.0 ? shift / mu[i] : std::numeric_limits<double>::infinity();
    }
    report.ratios.push_back(ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (i > 0 && !report.flagged) {
      const double prev = report.ratios[i - 1];
      if (prev > 0.0 && ratio > 10.0 * prev) {
        report.flagged = true;
        report.flagged_step = static_cast<int>(i) + 1;
      }
    }
  }
  return report;
}

}  // namespace kamforge
