#include "kamforge/conjugacy_chain.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "kamforge/errors.h"

namespace kamforge {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxDim = 4;

using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

// I + DU(x) and U(x).
void FactorJacobian(const FourierSeries& u, std::span<const double> x, SmallVec& value,
                    SmallMat& jac) {
  const int n = u.dim();
  double v[kMaxDim];
  double j[kMaxDim * kMaxDim];
  u.EvaluateReal(x, std::span<double>(v, n), std::span<double>(j, n * n));
  value.resize(n);
  jac.resize(n, n);
  for (int r = 0; r < n; ++r) {
    value(r) = v[r];
    for (int c = 0; c < n; ++c) jac(r, c) = (r == c ? 1.0 : 0.0) + j[r * n + c];
  }
}

}  // namespace

void ConjugacyChain::Append(FourierSeries angle_part) {
  if (angle_part.dim() != dim_ || angle_part.value_dim() != dim_) {
    throw KamError(ErrorKind::kInvalidArgument, "chain part has wrong shape");
  }
  parts_.push_back({std::move(angle_part), std::nullopt, {}});
}

void ConjugacyChain::Append(FourierSeries angle_part, FourierSeries action_part,
                            std::vector<double> center) {
  if (angle_part.dim() != dim_ || angle_part.value_dim() != dim_ ||
      action_part.dim() != dim_ || action_part.value_dim() != dim_ ||
      static_cast<int>(center.size()) != dim_) {
    throw KamError(ErrorKind::kInvalidArgument, "chain part has wrong shape");
  }
  parts_.push_back({std::move(angle_part), std::move(action_part), std::move(center)});
}

void ConjugacyChain::MapAngles(std::span<const double> phi, std::span<double> theta) const {
  double x[kMaxDim], u[kMaxDim];
  const int n = dim_;
  for (int a = 0; a < n; ++a) x[a] = phi[a];
  for (auto it = parts_.rbegin(); it != parts_.rend(); ++it) {
    it->angle.EvaluateReal(std::span<const double>(x, n), std::span<double>(u, n));
    for (int a = 0; a < n; ++a) x[a] += u[a];
  }
  for (int a = 0; a < n; ++a) theta[a] = x[a];
}

void ConjugacyChain::MapPoint(std::span<const double> phi, std::span<const double> s,
                              std::span<double> theta, std::span<double> r) const {
  const int n = dim_;
  SmallVec x(n), y(n), u, v(n);
  SmallMat jac;
  for (int a = 0; a < n; ++a) {
    x(a) = phi[a];
    y(a) = s[a];
  }
  for (auto it = parts_.rbegin(); it != parts_.rend(); ++it) {
    const std::span<const double> xs(x.data(), n);
    FactorJacobian(it->angle, xs, u, jac);
    if (it->action) {
      SmallVec c(n);
      for (int a = 0; a < n; ++a) c(a) = it->center[a];
      it->action->EvaluateReal(xs, std::span<double>(v.data(), n));
      y = c + jac.transpose().partialPivLu().solve(SmallVec(y - c)) + v;
    }
    x += u;
  }
  for (int a = 0; a < n; ++a) {
    theta[a] = x(a);
    r[a] = y(a);
  }
}

int ConjugacyChain::InvertFactor(const ChainPart& part, std::span<double> x,
                                 std::span<double> jac_out) const {
  const int n = dim_;
  // Work on the representative in [0, 2pi); the factor commutes with 2pi shifts.
  double shift[kMaxDim];
  SmallVec target(n), z(n), u;
  SmallMat jac;
  for (int a = 0; a < n; ++a) {
    shift[a] = kTwoPi * std::floor(x[a] / kTwoPi);
    target(a) = x[a] - shift[a];
  }
  FactorJacobian(part.angle, std::span<const double>(target.data(), n), u, jac);
  z = target - u;
  int it = 0;
  double residual = 0.0;
  for (; it <= kMaxInversionIterations; ++it) {
    FactorJacobian(part.angle, std::span<const double>(z.data(), n), u, jac);
    const SmallVec f = z + u - target;
    residual = f.cwiseAbs().maxCoeff();
    if (!std::isfinite(residual)) break;
    if (residual <= 4e-16 * (1.0 + target.cwiseAbs().maxCoeff())) break;
    const SmallVec dz = jac.partialPivLu().solve(f);
    z -= dz;
    if (dz.cwiseAbs().maxCoeff() <= 1e-17 * (1.0 + z.cwiseAbs().maxCoeff())) {
      FactorJacobian(part.angle, std::span<const double>(z.data(), n), u, jac);
      residual = (z + u - target).cwiseAbs().maxCoeff();
      break;
    }
  }
  if (!(residual <= 1e-12) || it > kMaxInversionIterations) {
    throw KamError(ErrorKind::kInversionFailure,
                   "Newton inversion of a chain factor did not converge");
  }
  for (int a = 0; a < n; ++a) x[a] = z(a) + shift[a];
  if (!jac_out.empty()) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) jac_out[r * n + c] = jac(r, c);
    }
  }
  return it;
}

int ConjugacyChain::InvertAngles(std::span<const double> theta, std::span<double> phi) const {
  const int n = dim_;
  double x[kMaxDim];
  for (int a = 0; a < n; ++a) x[a] = theta[a];
  int worst = 0;
  for (const ChainPart& part : parts_) {
    worst = std::max(worst, InvertFactor(part, std::span<double>(x, n), {}));
  }
  for (int a = 0; a < n; ++a) phi[a] = x[a];
  return worst;
}

int ConjugacyChain::InvertPoint(std::span<const double> theta, std::span<const double> r,
                                std::span<double> phi, std::span<double> s) const {
  const int n = dim_;
  double x[kMaxDim], j[kMaxDim * kMaxDim], v[kMaxDim];
  SmallVec y(n), c(n), vv(n);
  SmallMat jac(n, n);
  for (int a = 0; a < n; ++a) {
    x[a] = theta[a];
    y(a) = r[a];
  }
  int worst = 0;
  for (const ChainPart& part : parts_) {
    worst = std::max(worst, InvertFactor(part, std::span<double>(x, n),
                                         std::span<double>(j, n * n)));
    if (part.action) {
      part.action->EvaluateReal(std::span<const double>(x, n), std::span<double>(v, n));
      for (int a = 0; a < n; ++a) {
        c(a) = part.center[a];
        vv(a) = v[a];
        for (int b = 0; b < n; ++b) jac(a, b) = j[a * n + b];
      }
      y = c + jac.transpose() * SmallVec(y - vv - c);
    }
  }
  for (int a = 0; a < n; ++a) {
    phi[a] = x[a];
    s[a] = y(a);
  }
  return worst;
}

}  // namespace kamforge
