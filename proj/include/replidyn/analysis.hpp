#pragma once

// Long-run answers built on top of the integrator: outcome of an initial
// condition, basin-of-attraction maps, the saddle separatrix, and feature
// measurements on trajectories.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "replidyn/dynamics.hpp"
#include "replidyn/game_model.hpp"
#include "replidyn/integrate.hpp"

namespace replidyn {

enum class OutcomeKind { Converged, PeriodicOrbit, Undecided };

struct Outcome {
  OutcomeKind kind;
  std::optional<StationaryPoint> point;  // Converged: the sink reached
  std::optional<double> period;          // PeriodicOrbit
  std::optional<double> h_level;         // PeriodicOrbit: conserved-quantity level
  double t_reached = 0;                  // horizon reached (Undecided) / event time
};

// Integrates and maps the termination to an Outcome. Propagates step
// failures as StepFailureError.
Outcome long_run_outcome(const GameParams& params, const PopulationState& start,
                         const IntegratorOptions& opts = {});

struct BasinCell {
  OutcomeKind kind = OutcomeKind::Undecided;
  std::optional<PointKind> sink;  // which sink, when kind == Converged
};

// Grid over the open unit square; cell (i, j) is centered at
// ((i+0.5)/n, (j+0.5)/n). Cells are integrated independently; the merged
// result is deterministic regardless of scheduling. REPLIDYN_THREADS caps
// worker count.
struct BasinMap {
  int n = 0;
  std::vector<BasinCell> cells;  // index i*n + j
  std::vector<std::string> notes;

  const BasinCell& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * n + j]; }
  static PopulationState center(int n, int i, int j) {
    return {(i + 0.5) / n, (j + 0.5) / n};
  }
};

BasinMap basin_map(const GameParams& params, int n, const IntegratorOptions& opts = {});

// The two branches of the interior saddle's stable manifold, each oriented
// from near a source corner toward the saddle. Every vertex lies strictly
// inside the unit square.
struct Separatrix {
  std::vector<PopulationState> upper;  // starts near (0,1)
  std::vector<PopulationState> lower;  // starts near (1,0)
};

// Seeds at saddle +- 1e-6 along the stable eigenvector and traces backward
// in time until within 1e-3 of a source corner. Throws NoSaddleError
// outside the bistable regime.
Separatrix separatrix(const GameParams& params, const IntegratorOptions& opts = {});

struct ExtremeValue {
  double value = 0;
  double t = 0;
};

struct VariableFeatures {
  ExtremeValue min;
  ExtremeValue max;
  std::vector<double> turning_times;  // where the variable's motion reverses
};

struct TrajectoryFeatures {
  VariableFeatures x;
  VariableFeatures y;
};

// Extrema are refined by a parabola through the discrete peak and its
// neighbors, so they do not inherit the output sampling grid.
TrajectoryFeatures trajectory_features(const Trajectory& traj);

const char* to_string(OutcomeKind kind);

}  // namespace replidyn
