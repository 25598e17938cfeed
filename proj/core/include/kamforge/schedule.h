#ifndef KAMFORGE_SCHEDULE_H_
#define KAMFORGE_SCHEDULE_H_

#include <vector>

namespace kamforge {

struct ScheduleParams {
  double epsilon = 1e-4;
  int n = 1;
  int m = 1;
  double rho = 0.5;
  double eta = 2.0;
  double h0 = 0.5;
  double s0 = 0.5;
  double tau = 1.5;
  // Logarithm base for the cutoff recursion; 0 selects the natural log.
  double log_base = 0.0;
};

// Iteration bookkeeping: h, s, mu, K sequences indexed by step nu.
struct KamSchedule {
  ScheduleParams params;
  double gamma0 = 0.0;
  double mu0 = 0.0;
  std::vector<double> h;
  std::vector<double> s;
  std::vector<double> mu;
  // K[nu] for nu >= 1 follows ([log 1/mu_{nu-1}] + 1)^{3 eta}; K[0] repeats K[1].
  std::vector<double> K;

  int depth() const { return static_cast<int>(mu.size()); }
  // Extends all sequences to at least `depth` entries (h, s, mu) and
  // depth + 1 entries of K.
  void Extend(int depth);

  // sum over 0 < |k|_1 <= K[nu+1] of |k|^tau exp(-|k| (h_nu - h_{nu+1}) / 4)
  double Gamma(int nu) const;
  // 4^tau tau! / (h_nu - h_{nu+1})^tau
  double GammaBound(int nu) const;

  // Working Fourier cutoff for step nu: K[nu+1] clamped to [floor_k, cap].
  int WorkingCutoff(int nu, int floor_k, int cap) const;
};

// Throws BadExponents if (1+rho)^eta <= 2, InvalidArgument unless 0 < eps < 1.
KamSchedule ScheduleInit(const ScheduleParams& params, int depth = 12);

// Number of k in Z^n with |k|_1 = l.
double LatticeShellCount(int n, long long l);

// Closed form of the tail integral int_K^inf l^n exp(-l delta / 4) dl.
double TailIntegral(int n, double K, double delta);

}  // namespace kamforge

#endif  // KAMFORGE_SCHEDULE_H_
