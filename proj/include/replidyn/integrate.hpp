#pragma once

// Trajectory integration of the replicator system with event detection:
// convergence to an asymptotically stable point, and closed-orbit return
// through a Poincare section in the oscillatory regime.

#include <functional>
#include <optional>
#include <vector>

#include "replidyn/dynamics.hpp"
#include "replidyn/game_model.hpp"

namespace replidyn {

enum class Method { FixedRK4, AdaptiveRK45 };

struct IntegratorOptions {
  Method method = Method::AdaptiveRK45;
  double step = 1e-2;  // fixed step size, or the initial adaptive step
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double t_max = 200.0;
  double convergence_radius = 1e-6;  // distance gate of the convergence event
  double convergence_speed = 1e-8;   // field-magnitude gate of the convergence event
  double boundary_clamp = 1e-12;     // largest overshoot the unit-square clamp may absorb
  double closure_tolerance = 1e-4;   // Poincare return distance for orbit closure
  bool detect_closure = true;        // disable to integrate past the first revolution
};

// Throws std::invalid_argument when a field is out of range.
void validate_options(const IntegratorOptions& opts);

struct Sample {
  double t;
  double x;
  double y;
};

enum class Termination { ReachedTMax, Converged, OrbitClosed, StepFailure };

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double max_clamp = 0;  // largest unit-square overshoot absorbed by clamping
};

struct Trajectory {
  std::vector<Sample> samples;  // t strictly increasing, all inside [0,1]^2
  Termination termination = Termination::ReachedTMax;
  std::optional<StationaryPoint> converged_to;  // set iff termination == Converged
  std::optional<double> period;                 // set iff termination == OrbitClosed
  StepStats stats;
};

// One classical RK4 step on the replicator field, result clamped into
// [0,1]^2. Throws NonFiniteStateError if a stage evaluates non-finite.
PopulationState step_rk4(const GameParams& params, const PopulationState& state, double h);

// State-dependent step bound derived from the Jacobian, used to keep
// adaptive steps inside the method's stability interval near stiff sinks.
std::function<double(const Vec2&)> stability_step_cap(const GameParams& params);

// Integrates from `start` until t_max or an event fires. Consecutive output
// samples differ by at most 0.01 in max-norm (Hermite-interpolated between
// accepted steps). Deterministic: identical inputs give identical output.
Trajectory integrate(const GameParams& params, const PopulationState& start,
                     const IntegratorOptions& opts = {});

// Fires when the state is within convergence_radius of a candidate and the
// field magnitude there is below convergence_speed. Candidates are expected
// to be Sink-classified points.
std::optional<StationaryPoint> detect_convergence(const GameParams& params,
                                                  const PopulationState& state,
                                                  const std::vector<StationaryPoint>& candidates,
                                                  const IntegratorOptions& opts);

// Streaming detector for closed-orbit returns through the section
// {y = y*, x < x*}, the half-line through the interior point where ydot
// changes sign. Crossings in the same direction are compared against the
// first one; a return within `tolerance` yields the period.
class PoincareDetector {
 public:
  // Inactive when the parameters provide no interior point.
  PoincareDetector(const GameParams& params, double tolerance);

  bool active() const { return active_; }

  // Feed two consecutive trajectory samples; returns the period once a
  // crossing lands within tolerance of the first recorded crossing.
  std::optional<double> feed(const Sample& prev, const Sample& next);

  // The most recent section crossing seen by feed().
  const Sample& last_crossing() const { return last_cross_; }

 private:
  GameParams params_;
  double tolerance_;
  bool active_ = false;
  double x_star_ = 0, y_star_ = 0;
  bool have_first_ = false;
  double first_t_ = 0, first_x_ = 0;
  int first_dir_ = 0;
  Sample last_cross_{0, 0, 0};
};

// Scans an already-integrated trajectory for a closed-orbit return. Returns
// nullopt until two same-direction section crossings match within tolerance.
std::optional<double> detect_orbit_closure(const GameParams& params, const Trajectory& so_far,
                                           double tolerance);

const char* to_string(Termination termination);

}  // namespace replidyn
