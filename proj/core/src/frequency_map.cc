#include "kamforge/frequency_map.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kamforge {

bool Box::Contains(std::span<const double> x) const {
  for (int a = 0; a < dim(); ++a) {
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  }
  return true;
}

double Box::Clearance(std::span<const double> x) const {
  double c = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim(); ++a) c = std::min({c, x[a] - lo[a], hi[a] - x[a]});
  return c;
}

Box Box::Around(std::span<const double> center, double half_width) {
  Box b;
  for (double c : center) {
    b.lo.push_back(c - half_width);
    b.hi.push_back(c + half_width);
  }
  return b;
}

double SupNorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double L1Distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

namespace {

std::vector<double> RandomPoint(const Box& box, UniformSource& rng) {
  std::vector<double> x(box.dim());
  for (int a = 0; a < box.dim(); ++a) x[a] = rng.Next(box.lo[a], box.hi[a]);
  return x;
}

double Distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

ModulusCheck CheckFrequencyMapModuli(const FrequencyMap& map, int pairs, uint64_t seed) {
  UniformSource rng(seed);
  ModulusCheck check;
  check.lower_ratio = std::numeric_limits<double>::infinity();
  const Box ball = Box::Around(map.base, map.ball_radius);
  for (int i = 0; i < pairs; ++i) {
    const auto x = RandomPoint(map.region, rng);
    const auto y = RandomPoint(map.region, rng);
    const double d = std::min(1.0, Distance(x, y));
    if (d > 0.0) {
      const double dw = Distance(map(x), map(y));
      check.upper_ratio =
          std::max(check.upper_ratio, dw / (map.upper_seminorm * map.modulus_upper(d)));
    }
    const auto u = RandomPoint(ball, rng);
    const auto v = RandomPoint(ball, rng);
    const double e = Distance(u, v);
    if (e > 0.0 && e <= 1.0) {
      check.lower_ratio =
          std::min(check.lower_ratio, Distance(map(u), map(v)) / map.modulus_lower(e));
    }
  }
  return check;
}

double EstimateUpperSeminorm(const FrequencyMap& map, int pairs, uint64_t seed) {
  UniformSource rng(seed);
  double best = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const auto x = RandomPoint(map.region, rng);
    const auto y = RandomPoint(map.region, rng);
    const double d = std::min(1.0, Distance(x, y));
    if (d > 0.0) best = std::max(best, Distance(map(x), map(y)) / map.modulus_upper(d));
  }
  return best;
}

}  // namespace kamforge
