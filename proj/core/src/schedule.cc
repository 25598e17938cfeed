#include "kamforge/schedule.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kamforge/errors.h"

namespace kamforge {
namespace {

double Binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (long long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  return r;
}

}  // namespace

double LatticeShellCount(int n, long long l) {
  if (l == 0) return 1.0;
  double total = 0.0;
  for (int j = 1; j <= std::min<long long>(n, l); ++j) {
    total += std::ldexp(1.0, j) * Binomial(n, j) * Binomial(l - 1, j - 1);
  }
  return total;
}

double TailIntegral(int n, double K, double delta) {
  // (4/delta)^{n+1} * Gamma(n+1, x) with x = K delta / 4, and
  // Gamma(n+1, x) = n! e^{-x} sum_{j<=n} x^j / j!.
  const double x = K * delta / 4.0;
  double term = 1.0, sum = 1.0, factorial = 1.0;
  for (int j = 1; j <= n; ++j) {
    term *= x / j;
    sum += term;
    factorial *= j;
  }
  return std::pow(4.0 / delta, n + 1) * factorial * std::exp(-x) * sum;
}

KamSchedule ScheduleInit(const ScheduleParams& params, int depth) {
  if (std::pow(1.0 + params.rho, params.eta) <= 2.0) {
    throw KamError(ErrorKind::kBadExponents, "(1+rho)^eta must exceed 2");
  }
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw KamError(ErrorKind::kInvalidArgument, "schedule needs 0 < epsilon < 1");
  }
  if (!(params.rho > 0.0 && params.rho < 1.0) || params.n < 1 || params.m < 1 ||
      !(params.h0 > 0.0) || !(params.s0 > 0.0)) {
    throw KamError(ErrorKind::kInvalidArgument, "bad schedule parameters");
  }
  KamSchedule s;
  s.params = params;
  s.gamma0 = std::pow(params.epsilon, 1.0 / (4.0 * (params.n + params.m + 2)));
  s.mu0 = std::pow(params.epsilon, 1.0 / (8.0 * params.eta * (params.m + 1)));
  s.h = {params.h0};
  s.s = {params.s0};
  s.mu = {s.mu0};
  s.K.clear();
  s.Extend(depth);
  return s;
}

void KamSchedule::Extend(int depth) {
  const double h0 = params.h0;
  while (static_cast<int>(mu.size()) < depth) {
    h.push_back(h.back() / 2.0 + h0 / 4.0);
    s.push_back(s.back() / 2.0);
    mu.push_back(std::pow(mu.back(), 1.0 + params.rho));
  }
  const double log_scale = params.log_base > 0.0 ? std::log(params.log_base) : 1.0;
  K.resize(1);
  for (int nu = 1; nu <= depth; ++nu) {
    const double lg = std::log(1.0 / mu[nu - 1]) / log_scale;
    K.push_back(std::pow(std::floor(lg) + 1.0, 3.0 * params.eta));
  }
  K[0] = K[1];
  // one more h so that h_{nu+1} and h_{nu+2} exist for every recorded step
  while (static_cast<int>(h.size()) < depth + 2) {
    h.push_back(h.back() / 2.0 + h0 / 4.0);
    s.push_back(s.back() / 2.0);
  }
}

double KamSchedule::Gamma(int nu) const {
  const double delta = h[nu] - h[nu + 1];
  const double tau = params.tau;
  const double kmax = std::min(K[nu + 1], 1e7);
  double total = 0.0;
  for (long long l = 1; l <= static_cast<long long>(kmax); ++l) {
    total += LatticeShellCount(params.n, l) * std::pow(static_cast<double>(l), tau) *
             std::exp(-static_cast<double>(l) * delta / 4.0);
  }
  return total;
}

double KamSchedule::GammaBound(int nu) const {
  const double delta = h[nu] - h[nu + 1];
  const double tau = params.tau;
  return std::pow(4.0, tau) * std::tgamma(tau + 1.0) / std::pow(delta, tau);
}

int KamSchedule::WorkingCutoff(int nu, int floor_k, int cap) const {
  const double k = nu + 1 < static_cast<int>(K.size()) ? K[nu + 1] : K.back();
  if (!(k < static_cast<double>(cap))) return cap;
  return std::clamp(static_cast<int>(k), floor_k, cap);
}

}  // namespace kamforge
