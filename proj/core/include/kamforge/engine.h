#ifndef KAMFORGE_ENGINE_H_
#define KAMFORGE_ENGINE_H_

#include <span>
#include <string>
#include <vector>

#include "kamforge/fourier.h"
#include "kamforge/schedule.h"
#include "kamforge/small_divisors.h"

namespace kamforge {

// Settings shared by the parameter and twist engines.
struct EngineConfig {
  double tol = 1e-12;       // stop when the grid sup of the perturbation drops below
  double freq_tol = 1e-12;  // frequency-equation residual
  double guard = kDefaultDivisorGuard;
  int max_steps = 30;
  int k_floor = 8;
  int k_cap = 256;
  // epsilon, n and m are filled in from the model.
  ScheduleParams schedule;
  DiophantineParams diophantine;
  bool check_diophantine = true;
  double trust_radius = 0.5;
  // Least-residual frequency solve for m != n.
  bool range_mode = false;
  // Twist engine: keep the base action fixed and let the rotation drift.
  bool ablate_translation = false;
  int residual_grid = 1024;
};

enum class RunStatus { kConverged, kMaxSteps, kDiverged };

std::string RunStatusName(RunStatus s);

// Drops trailing shells whose coefficients sum to at most `tail` in absolute
// value. Keeps compositions cheap when a correction is effectively a
// trigonometric polynomial.
FourierSeries TrimSeries(const FourierSeries& f, double tail = 1e-18);

// Points of `grid`, dim entries per point.
std::vector<double> GridPoints(const UniformGrid& grid);

// Working grid for step nu.
struct StepGrid {
  int cutoff = 0;           // truncation order K
  int analysis_cutoff = 0;  // order used when reading grid samples back
  UniformGrid grid;
};

StepGrid MakeStepGrid(const KamSchedule& schedule, int nu, int dim,
                      const EngineConfig& config);

// Same grid with the cutoff doubled (up to the cap). Returns false at the cap.
bool RefineStepGrid(StepGrid& g, const EngineConfig& config);

// Sum of |c_k| over cutoff < |k|_1, all components.
double BandTail(const FourierSeries& f, int cutoff);

// Stateful divergence policy: two consecutive increases of the norm.
class DivergenceGuard {
 public:
  // Throws DivergenceDetected on a non-finite norm or the second consecutive rise.
  void Observe(double norm);

 private:
  double last_ = -1.0;
  int rises_ = 0;
};

}  // namespace kamforge

#endif  // KAMFORGE_ENGINE_H_
