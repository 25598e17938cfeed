#ifndef KAMFORGE_MODULUS_H_
#define KAMFORGE_MODULUS_H_

#include <functional>
#include <string>
#include <vector>

namespace kamforge {

// A named monotone gauge x -> w(x) with w(0+) = 0, used both as an upper
// regularity bound and as a lower (weak convexity) bound.
class ModulusOfContinuity {
 public:
  using Gauge = std::function<double(double)>;

  // If `inverse` is empty the inverse is computed by log-space bisection.
  ModulusOfContinuity(std::string name, Gauge eval, Gauge inverse = {});

  static ModulusOfContinuity Lipschitz();
  // x^alpha, 0 < alpha <= 1.
  static ModulusOfContinuity Holder(double alpha);
  // 1 / (1 - log x), behaves like (-log x)^-1 near zero.
  static ModulusOfContinuity LogLipschitz();
  // scale * x^beta.
  static ModulusOfContinuity Power(double beta, double scale);
  // Piecewise linear in log-log coordinates through (xs, values). Values are
  // raised where needed so every segment has log-log slope >= 1e-3.
  // Extrapolates with the end slopes.
  static ModulusOfContinuity Tabulated(std::string name, std::vector<double> xs,
                                       std::vector<double> values);

  const std::string& name() const { return name_; }
  double operator()(double x) const { return eval_(x); }
  double Inverse(double y) const;

  struct Admissibility {
    bool increasing = false;
    bool vanishes_at_zero = false;
    // max of x / w(x) over the ten smallest samples
    double small_ratio = 0.0;
    bool bounded_ratio = false;
    // max relative error of Inverse(w(x)) against x
    double inverse_error = 0.0;
  };

  // Samples `count` log-spaced points on [1e-12, 1].
  Admissibility Check(int count = 241, double ratio_bound = 1e6) const;
  bool IsAdmissible() const;

  // max over small samples of this(x) / other(x); finite means this <= other
  // in the comparison order of gauges.
  double RatioBound(const ModulusOfContinuity& other) const;

 private:
  std::string name_;
  Gauge eval_;
  Gauge inverse_;
};

std::vector<double> LogSpacedSamples(double lo, double hi, int count);

}  // namespace kamforge

#endif  // KAMFORGE_MODULUS_H_
