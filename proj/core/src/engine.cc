#include "kamforge/engine.h"

#include <algorithm>
#include <cmath>

#include "kamforge/errors.h"
#include "kamforge/frequency_solver.h"

namespace kamforge {

std::string RunStatusName(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kMaxSteps:
      return "max_steps";
    case RunStatus::kDiverged:
      return "diverged";
  }
  return "unknown";
}

FourierSeries TrimSeries(const FourierSeries& f, double tail) {
  std::vector<double> shell(f.cutoff() + 1, 0.0);
  for (int i = 0; i < f.num_modes(); ++i) {
    const int l = L1Norm(f.mode(i));
    for (int c = 0; c < f.value_dim(); ++c) shell[l] += std::abs(f.coeff(i, c));
  }
  int keep = f.cutoff();
  double dropped = 0.0;
  while (keep > 0 && dropped + shell[keep] <= tail) {
    dropped += shell[keep];
    --keep;
  }
  return keep == f.cutoff() ? f : f.WithCutoff(keep);
}

std::vector<double> GridPoints(const UniformGrid& grid) {
  std::vector<double> pts(static_cast<size_t>(grid.num_points()) * grid.dim);
  for (int p = 0; p < grid.num_points(); ++p) {
    grid.Point(p, std::span<double>(pts.data() + static_cast<size_t>(p) * grid.dim,
                                    grid.dim));
  }
  return pts;
}

StepGrid MakeStepGrid(const KamSchedule& schedule, int nu, int dim,
                      const EngineConfig& config) {
  StepGrid g;
  g.cutoff = schedule.WorkingCutoff(nu, config.k_floor, config.k_cap);
  g.grid.dim = dim;
  g.grid.points_per_axis = CompositionGridSize(g.cutoff);
  g.analysis_cutoff = g.grid.points_per_axis / 2 - 1;
  return g;
}

bool RefineStepGrid(StepGrid& g, const EngineConfig& config) {
  if (g.cutoff >= config.k_cap) return false;
  g.cutoff = std::min(2 * g.cutoff, config.k_cap);
  g.grid.points_per_axis = CompositionGridSize(g.cutoff);
  g.analysis_cutoff = g.grid.points_per_axis / 2 - 1;
  return true;
}

double BandTail(const FourierSeries& f, int cutoff) {
  double s = 0.0;
  for (int i = 0; i < f.num_modes(); ++i) {
    if (L1Norm(f.mode(i)) <= cutoff) continue;
    for (int c = 0; c < f.value_dim(); ++c) s += std::abs(f.coeff(i, c));
  }
  return s;
}

void DivergenceGuard::Observe(double norm) {
  if (!std::isfinite(norm)) {
    throw KamError(ErrorKind::kDivergenceDetected, "non-finite perturbation norm");
  }
  if (last_ >= 0.0 && norm > last_) {
    if (++rises_ >= 2) {
      throw KamError(ErrorKind::kDivergenceDetected,
                     "perturbation norm grew on two consecutive steps (" +
                         FormatDouble(norm) + ")");
    }
  } else {
    rises_ = 0;
  }
  last_ = norm;
}

}  // namespace kamforge
