#ifndef KAMFORGE_FREQUENCY_MAP_H_
#define KAMFORGE_FREQUENCY_MAP_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "kamforge/modulus.h"

namespace kamforge {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool Contains(std::span<const double> x) const;
  // Distance from x to the boundary (negative outside), sup-metric.
  double Clearance(std::span<const double> x) const;
  static Box Around(std::span<const double> center, double half_width);
};

using VectorFn = std::function<std::vector<double>(std::span<const double>)>;

// omega: R^m -> R^n on a box, with an upper gauge (continuity) and a lower
// gauge (weak convexity near `base`).
struct FrequencyMap {
  int domain_dim = 1;
  int range_dim = 1;
  VectorFn eval;
  Box region;
  ModulusOfContinuity modulus_lower = ModulusOfContinuity::Lipschitz();
  ModulusOfContinuity modulus_upper = ModulusOfContinuity::Lipschitz();
  double upper_seminorm = 1.0;
  std::vector<double> base;
  double ball_radius = 0.5;

  std::vector<double> operator()(std::span<const double> x) const { return eval(x); }
};

double SupNorm(std::span<const double> v);
double L1Distance(std::span<const double> a, std::span<const double> b);

// Uniform doubles in [0,1) from std::mt19937_64. The bit-to-double mapping is
// done here because std distributions are not reproducible across libraries.
class UniformSource {
 public:
  explicit UniformSource(uint64_t seed) : engine_(seed) {}
  double Next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Next(double lo, double hi) { return lo + (hi - lo) * Next(); }

 private:
  std::mt19937_64 engine_;
};

struct ModulusCheck {
  // Upper: max of |w(x)-w(y)| / (seminorm * modulus_upper(|x-y|)), must be <= 1.
  double upper_ratio = 0.0;
  // Lower: min of |w(x)-w(y)| / modulus_lower(|x-y|) inside the ball, must be >= 1.
  double lower_ratio = 0.0;
};

ModulusCheck CheckFrequencyMapModuli(const FrequencyMap& map, int pairs, uint64_t seed);

// Empirical [omega]_{w*} from random pairs in the region.
double EstimateUpperSeminorm(const FrequencyMap& map, int pairs, uint64_t seed);

}  // namespace kamforge

#endif  // KAMFORGE_FREQUENCY_MAP_H_
