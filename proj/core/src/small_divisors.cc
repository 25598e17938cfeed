#include "kamforge/small_divisors.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kamforge/errors.h"

namespace kamforge {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string FormatMode(std::span<const int> k) {
  std::string s = "(";
  for (size_t a = 0; a < k.size(); ++a) {
    if (a) s += ",";
    s += std::to_string(k[a]);
  }
  return s + ")";
}

}  // namespace

DivisorReport CheckDiophantine(std::span<const double> omega,
                               const DiophantineParams& params) {
  const int dim = static_cast<int>(omega.size());
  const double period = params.period == AnglePeriod::kTwoPi ? kTwoPi : 1.0;
  double bound = params.bound;
  if (bound <= 0.0) {
    for (double w : omega) bound = std::max(bound, std::abs(w));
  }
  DivisorReport report;
  report.worst_value = std::numeric_limits<double>::infinity();
  const auto table = GetModeTable(dim, params.k_max);
  for (int i = 0; i < table->num_modes(); ++i) {
    const auto k = table->mode(i);
    const int k1 = L1Norm(k);
    if (k1 == 0) continue;
    double dot = 0.0;
    for (int a = 0; a < dim; ++a) dot += k[a] * omega[a];
    // Nearest admissible multiple; |j| <= bound*|k| covers every relevant one.
    double j = std::round(dot / period);
    const double j_max = std::ceil(bound * k1 / period);
    j = std::clamp(j, -j_max, j_max);
    const double value = std::pow(k1, params.tau) * std::abs(dot - j * period);
    if (value < report.worst_value) {
      report.worst_value = value;
      report.worst_k.assign(k.begin(), k.end());
    }
  }
  report.satisfied = report.worst_value >= params.gamma;
  return report;
}

double GoldenLikeFrequency(std::span<const int> tail, std::span<const int> prefix) {
  if (tail.empty()) {
    throw KamError(ErrorKind::kInvalidArgument, "continued-fraction tail is empty");
  }
  auto check = [](int a) {
    if (a < 1 || a > 2) {
      throw KamError(ErrorKind::kInvalidArgument,
                     "partial quotients must be 1 or 2, got " + std::to_string(a));
    }
  };
  for (int a : tail) check(a);
  for (int a : prefix) check(a);
  // Purely periodic part: x = 1/(a1 + 1/(a2 + ... + 1/(ak + x))), a contraction.
  double x = 0.5;
  for (int it = 0; it < 200; ++it) {
    double y = x;
    for (auto it2 = tail.rbegin(); it2 != tail.rend(); ++it2) y = 1.0 / (*it2 + y);
    if (y == x) break;
    x = y;
  }
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) x = 1.0 / (*it + x);
  return kTwoPi * x;
}

double DivisorModulus(std::span<const int> k, std::span<const double> omega) {
  double dot = 0.0;
  for (size_t a = 0; a < k.size(); ++a) dot += k[a] * omega[a];
  return 2.0 * std::abs(std::sin(0.5 * dot));
}

FourierSeries SolveHomological(const FourierSeries& rhs, std::span<const double> omega,
                               double guard) {
  if (!(guard > 0.0)) throw KamError(ErrorKind::kInvalidArgument, "guard must be > 0");
  if (static_cast<int>(omega.size()) != rhs.dim()) {
    throw KamError(ErrorKind::kInvalidArgument, "rotation vector has wrong dimension");
  }
  const int vd = rhs.value_dim();
  for (int c = 0; c < vd; ++c) {
    if (std::abs(rhs.coeff(rhs.ZeroIndex(), c)) > 1e-14) {
      throw KamError(ErrorKind::kNonzeroMean, "rhs mean coefficient is nonzero");
    }
  }
  FourierSeries u(rhs.dim(), vd, rhs.cutoff(), rhs.real_valued());
  std::vector<int> neg(rhs.dim());
  for (int i = 0; i < rhs.num_modes(); ++i) {
    if (i == rhs.ZeroIndex()) continue;
    const auto k = rhs.mode(i);
    if (DivisorModulus(k, omega) < guard) {
      throw KamError(ErrorKind::kSmallDivisorBreach, "divisor below guard at k=" + FormatMode(k));
    }
    for (int a = 0; a < rhs.dim(); ++a) neg[a] = -k[a];
    const int j = rhs.IndexOf(neg);
    // For real data fill the conjugate partner from the "positive" half so
    // Hermitian symmetry is exact.
    if (rhs.real_valued() && j < i) continue;
    double dot = 0.0;
    for (int a = 0; a < rhs.dim(); ++a) dot += k[a] * omega[a];
    // exp(i x) - 1 = 2i sin(x/2) exp(i x/2)
    const Complex divisor = Complex(0.0, 2.0 * std::sin(0.5 * dot)) * std::polar(1.0, 0.5 * dot);
    for (int c = 0; c < vd; ++c) {
      const Complex value = rhs.coeff(i, c) / divisor;
      u.set_coeff(i, c, value);
      if (rhs.real_valued()) u.set_coeff(j, c, std::conj(value));
    }
  }
  return u;
}

}  // namespace kamforge
