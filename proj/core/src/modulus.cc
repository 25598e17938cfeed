#include "kamforge/modulus.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kamforge/errors.h"

namespace kamforge {
namespace {

// Flat stretches of a tabulated gauge are tilted to this log-log slope so the
// inverse stays well conditioned.
constexpr double kMinLogSlope = 1e-3;

}  // namespace

std::vector<double> LogSpacedSamples(double lo, double hi, int count) {
  std::vector<double> out(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    out[i] = std::exp(a + (b - a) * i / (count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

ModulusOfContinuity::ModulusOfContinuity(std::string name, Gauge eval,
                                         Gauge inverse)
    : name_(std::move(name)), eval_(std::move(eval)), inverse_(std::move(inverse)) {
  if (!eval_) throw KamError(ErrorKind::kInvalidArgument, "empty gauge");
}

ModulusOfContinuity ModulusOfContinuity::Lipschitz() {
  return {"lipschitz", [](double x) { return x; }, [](double y) { return y; }};
}

ModulusOfContinuity ModulusOfContinuity::Holder(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw KamError(ErrorKind::kInvalidArgument, "Holder exponent must lie in (0,1]");
  }
  return {"holder", [alpha](double x) { return std::pow(x, alpha); },
          [alpha](double y) { return std::pow(y, 1.0 / alpha); }};
}

ModulusOfContinuity ModulusOfContinuity::LogLipschitz() {
  return {"log_lipschitz", [](double x) { return 1.0 / (1.0 - std::log(x)); },
          [](double y) { return std::exp(1.0 - 1.0 / y); }};
}

ModulusOfContinuity ModulusOfContinuity::Power(double beta, double scale) {
  if (!(beta > 0.0 && scale > 0.0)) {
    throw KamError(ErrorKind::kInvalidArgument, "power gauge needs beta, scale > 0");
  }
  return {"power", [beta, scale](double x) { return scale * std::pow(x, beta); },
          [beta, scale](double y) { return std::pow(y / scale, 1.0 / beta); }};
}

ModulusOfContinuity ModulusOfContinuity::Tabulated(std::string name,
                                                   std::vector<double> xs,
                                                   std::vector<double> values) {
  if (xs.size() < 2 || xs.size() != values.size()) {
    throw KamError(ErrorKind::kInvalidArgument, "tabulated gauge needs >= 2 nodes");
  }
  std::vector<std::pair<double, double>> nodes;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && values[i] > 0.0)) {
      throw KamError(ErrorKind::kInvalidArgument, "tabulated gauge needs positive nodes");
    }
    nodes.emplace_back(xs[i], values[i]);
  }
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> lx, ly;
  for (const auto& [x, v] : nodes) {
    double y = std::log(v);
    if (!ly.empty()) {
      if (std::log(x) <= lx.back()) continue;
      y = std::max(y, ly.back() + kMinLogSlope * (std::log(x) - lx.back()));
    }
    lx.push_back(std::log(x));
    ly.push_back(y);
  }
  auto eval = [lx, ly](double x) {
    const double t = std::log(x);
    size_t i = std::upper_bound(lx.begin(), lx.end(), t) - lx.begin();
    i = std::clamp<size_t>(i, 1, lx.size() - 1);
    const double s = (ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]);
    return std::exp(ly[i - 1] + s * (t - lx[i - 1]));
  };
  auto inverse = [lx, ly](double y) {
    const double t = std::log(y);
    size_t i = std::upper_bound(ly.begin(), ly.end(), t) - ly.begin();
    i = std::clamp<size_t>(i, 1, ly.size() - 1);
    const double s = (ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]);
    return std::exp(lx[i - 1] + (t - ly[i - 1]) / s);
  };
  return {std::move(name), eval, inverse};
}

double ModulusOfContinuity::Inverse(double y) const {
  if (!(y > 0.0)) return 0.0;
  if (inverse_) return inverse_(y);
  double lo = std::log(1e-300);
  double hi = std::log(1e300);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval_(std::exp(mid)) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

ModulusOfContinuity::Admissibility ModulusOfContinuity::Check(
    int count, double ratio_bound) const {
  Admissibility a;
  const std::vector<double> xs = LogSpacedSamples(1e-12, 1.0, count);
  std::vector<double> w(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) w[i] = eval_(xs[i]);
  a.increasing = true;
  for (size_t i = 1; i < w.size(); ++i) {
    if (!(w[i] > w[i - 1])) a.increasing = false;
  }
  // Vanishing at zero: the gauge keeps decreasing at the small end and is
  // well below its value at 1.
  a.vanishes_at_zero = w.front() > 0.0 && w.front() < 0.1 * w.back();
  for (size_t i = 0; i < std::min<size_t>(10, xs.size()); ++i) {
    a.small_ratio = std::max(a.small_ratio, xs[i] / w[i]);
  }
  a.bounded_ratio = a.small_ratio <= ratio_bound;
  for (size_t i = 0; i < xs.size(); ++i) {
    a.inverse_error =
        std::max(a.inverse_error, std::abs(Inverse(w[i]) - xs[i]) / xs[i]);
  }
  return a;
}

bool ModulusOfContinuity::IsAdmissible() const {
  const Admissibility a = Check();
  return a.increasing && a.vanishes_at_zero && a.bounded_ratio &&
         a.inverse_error <= 1e-10;
}

double ModulusOfContinuity::RatioBound(const ModulusOfContinuity& other) const {
  double best = 0.0;
  for (double x : LogSpacedSamples(1e-12, 1e-2, 41)) {
    best = std::max(best, eval_(x) / other(x));
  }
  return best;
}

}  // namespace kamforge
