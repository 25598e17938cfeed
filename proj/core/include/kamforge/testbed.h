#ifndef KAMFORGE_TESTBED_H_
#define KAMFORGE_TESTBED_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kamforge/frequency_map.h"
#include "kamforge/kam_param.h"
#include "kamforge/kam_twist.h"
#include "kamforge/modulus.h"
#include "kamforge/small_divisors.h"

namespace kamforge {

// 2*pi*(sqrt(5)-1)/2 and 2*pi*(sqrt(2)-1).
double GoldenFrequency();
double SilverFrequency();

// theta1 = theta + r1, r1 = r + eps sin(theta); omega(r) = r on [p-1, p+1].
TwistMapModel StandardFamily(double epsilon, double p);

// r1 = r + eps sin(theta), theta1 = theta + Omega(r1) with
// Omega(s) = s + eps (0.5 + 0.25 cos s); omega(r) = r on [2, 4.5].
TwistMapModel TwistDriftFamily(double epsilon, double p);

// omega(r) = p + (r - r_star)^beta with r_star = p, kicked like the standard
// family and with a constant angular drift 0.5 eps.
TwistMapModel WeaklyConvexTwist(double epsilon, double p, int beta = 3);

// omega(r) = r + 0.1 r^3, kicked like the standard family.
TwistMapModel MonotoneCubicTwist(double epsilon, double p);

// f = 0, g = sin(theta), omega(r) = r. Not area preserving.
TwistMapModel KickShearFamily(double epsilon, double p);

// f = 1, g = 0, omega(r) = r.
TwistMapModel ConstantDriftFamily(double epsilon, double p);

// omega(r) = p + (r - r_star)^beta on [r_star - 1, r_star + 1] with lower
// gauge 2^{1-beta} x^beta. beta must be odd and >= 3.
FrequencyMap WeaklyConvexFrequency(int beta, double p, double r_star, double delta = 0.5);

// xi -> amplitude * sum_{j=1}^{terms} cos(b_j xi + phase_j) / j! with
// b_j = 3e7 e^{j-1} and phases drawn from the seed.
class NowhereHolderField {
 public:
  NowhereHolderField(uint64_t seed, double amplitude, int terms = 8);

  double operator()(double xi) const;
  double amplitude() const { return amplitude_; }
  // amplitude * sum 1/j!, below amplitude * (e - 1).
  double UniformBound() const;
  const std::vector<double>& frequencies() const { return freq_; }

  // Tabulated upper gauge from the largest sampled increment at dyadic scales
  // 2^0 ... 2^-48 around `center`, padded by a factor of two.
  ModulusOfContinuity EmpiricalGauge(double center, int samples_per_scale = 256,
                                     uint64_t seed = 7) const;

 private:
  double amplitude_;
  std::vector<double> weight_;
  std::vector<double> freq_;
  std::vector<double> phase_;
};

NowhereHolderField NowhereHoelderParameterField(uint64_t seed, double amplitude);

// Slope of log(max increment at scale 2^-j) against log(2^-j) for
// j = min_exp..max_exp, increments sampled in [center - 0.5, center + 0.5].
double EstimateHolderExponent(const std::function<double(double)>& f, double center,
                              int min_exp, int max_exp, int samples_per_scale,
                              uint64_t seed);

// theta -> theta + xi + eps (1 + cos theta).
ParamMapModel RotationGoldenFamily(double epsilon, double q);
// theta -> theta + xi + eps cos theta.
ParamMapModel RotationZeroMeanFamily(double epsilon, double q);
// f = F(xi) + (1 + 0.1 F(xi)) cos theta + 0.2 sin 2 theta with F nowhere Holder.
ParamMapModel RoughRotationFamily(double epsilon, double q, uint64_t seed);
// Two angles, omega = identity.
ParamMapModel Rotation2dFamily(double epsilon, std::span<const double> q);

// A frequency map with a target and a box, used by the degree and range checks.
struct FrequencyCase {
  FrequencyMap map;
  std::vector<double> p;
  Box box;
};

struct KnownFacts {
  std::optional<double> rotation_at_zero;  // on the base circle at eps = 0
  std::optional<int> degree;
  std::optional<int> lower_gauge_beta;  // |w(x)-w(y)| >= 2^{1-beta} |x-y|^beta
  bool area_preserving = false;
};

enum class ModelKind { kTwist, kParam, kFrequency };

std::string ModelKindName(ModelKind k);

struct ModelOverrides {
  std::optional<double> epsilon;
  std::optional<std::vector<double>> target;
  std::optional<Box> box;
  uint64_t seed = 1;
};

struct MapCatalogEntry {
  std::string name;
  std::string summary;
  ModelKind kind = ModelKind::kTwist;
  KnownFacts facts;
  double default_epsilon = 0.0;
  int default_kcap = 256;
  DiophantineParams diophantine;
  std::function<TwistMapModel(const ModelOverrides&)> twist;
  std::function<ParamMapModel(const ModelOverrides&)> param;
  std::function<FrequencyCase(const ModelOverrides&)> frequency;
};

const std::vector<MapCatalogEntry>& Catalog();
// Throws InvalidArgument for unknown names.
const MapCatalogEntry& FindCatalogEntry(const std::string& name);

// Central-difference Jacobian determinant of a one-dimensional twist model.
double EstimateJacobianDeterminant(const TwistMapModel& model, double theta, double r,
                                   double h = 1e-5);

}  // namespace kamforge

#endif  // KAMFORGE_TESTBED_H_
