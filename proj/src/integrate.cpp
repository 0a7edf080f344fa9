#include "replidyn/integrate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "replidyn/errors.hpp"
#include "replidyn/ode.hpp"

namespace replidyn {

namespace {

struct FieldRHS {
  GameParams params;
  Vec2 operator()(const Vec2& v) const { return vector_field(params, {v.x, v.y}); }
};

double maxnorm(const Vec2& a, const Vec2& b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

}  // namespace

// 2.5 / (Gershgorin radius of the Jacobian): keeps h inside the stability
// interval of the embedded pair so decay toward a sink stays monotone.
std::function<double(const Vec2&)> stability_step_cap(const GameParams& params) {
  return [params](const Vec2& v) {
    Mat2 j = jacobian(params, {v.x, v.y});
    double bound = std::max(std::abs(j.a11) + std::abs(j.a12),
                            std::abs(j.a21) + std::abs(j.a22));
    return bound > 1e-12 ? 2.5 / bound : std::numeric_limits<double>::infinity();
  };
}

void validate_options(const IntegratorOptions& o) {
  if (!(o.step > 0)) throw std::invalid_argument("integrator: step must be > 0");
  if (!(o.abs_tol > 0) || !(o.rel_tol > 0))
    throw std::invalid_argument("integrator: tolerances must be > 0");
  if (!(o.t_max > 0)) throw std::invalid_argument("integrator: t_max must be > 0");
  if (!(o.convergence_radius > 0))
    throw std::invalid_argument("integrator: convergence_radius must be > 0");
  if (!(o.convergence_speed > 0))
    throw std::invalid_argument("integrator: convergence_speed must be > 0");
  if (!(o.boundary_clamp >= 0) || o.boundary_clamp >= 1e-6)
    throw std::invalid_argument("integrator: boundary_clamp must be in [0, 1e-6)");
  if (!(o.closure_tolerance > 0))
    throw std::invalid_argument("integrator: closure_tolerance must be > 0");
}

PopulationState step_rk4(const GameParams& params, const PopulationState& state, double h) {
  if (!(h > 0)) throw std::invalid_argument("step_rk4: h must be > 0");
  FieldRHS rhs{params};
  Vec2 y = ode::rk4_step(rhs, {state.x, state.y}, h);
  if (!ode::finite(y)) throw NonFiniteStateError("step_rk4: non-finite state");
  y = ode::clamp_unit_square(y);
  return {y.x, y.y};
}

std::optional<StationaryPoint> detect_convergence(const GameParams& params,
                                                  const PopulationState& state,
                                                  const std::vector<StationaryPoint>& candidates,
                                                  const IntegratorOptions& opts) {
  for (const StationaryPoint& p : candidates) {
    double dist = std::hypot(state.x - p.location.x, state.y - p.location.y);
    if (dist < opts.convergence_radius) {
      Vec2 f = vector_field(params, state);
      if (std::hypot(f.x, f.y) < opts.convergence_speed) return p;
    }
  }
  return std::nullopt;
}

PoincareDetector::PoincareDetector(const GameParams& params, double tolerance)
    : params_(params), tolerance_(tolerance) {
  if (auto ip = interior_point(params)) {
    x_star_ = ip->x;
    y_star_ = ip->y;
    active_ = true;
  }
}

std::optional<double> PoincareDetector::feed(const Sample& prev, const Sample& next) {
  if (!active_) return std::nullopt;
  double d0 = prev.y - y_star_;
  double d1 = next.y - y_star_;
  bool straddles = (d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0) || (d0 == 0.0 && d1 != 0.0);
  if (!straddles) return std::nullopt;

  // Refine the crossing on the Hermite interpolant of this sample interval.
  FieldRHS rhs{params_};
  ode::Segment seg{prev.t, next.t, {prev.x, prev.y}, {next.x, next.y},
                   rhs({prev.x, prev.y}), rhs({next.x, next.y})};
  double u = 0.0;
  if (d0 != 0.0) {
    double lo = 0.0, hi = 1.0, glo = d0;
    for (int i = 0; i < 60; ++i) {
      double mid = 0.5 * (lo + hi);
      double g = ode::hermite(seg, mid).y - y_star_;
      if (g == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((g < 0) == (glo < 0)) {
        lo = mid;
        glo = g;
      } else {
        hi = mid;
      }
    }
    u = 0.5 * (lo + hi);
  }
  Vec2 at = ode::hermite(seg, u);
  double tc = prev.t + u * (next.t - prev.t);
  if (!(at.x < x_star_)) return std::nullopt;  // only the half-line left of the interior point

  int dir = d1 > d0 ? 1 : -1;
  last_cross_ = {tc, at.x, y_star_};
  if (!have_first_) {
    have_first_ = true;
    first_t_ = tc;
    first_x_ = at.x;
    first_dir_ = dir;
    return std::nullopt;
  }
  if (dir == first_dir_ && std::abs(at.x - first_x_) <= tolerance_) return tc - first_t_;
  return std::nullopt;
}

std::optional<double> detect_orbit_closure(const GameParams& params, const Trajectory& so_far,
                                           double tolerance) {
  PoincareDetector detector(params, tolerance);
  for (std::size_t i = 1; i < so_far.samples.size(); ++i) {
    if (auto period = detector.feed(so_far.samples[i - 1], so_far.samples[i])) return period;
  }
  return std::nullopt;
}

namespace {

// Drives sample emission and events over accepted segments; shared between
// the adaptive and fixed-step paths.
class SegmentSink {
 public:
  SegmentSink(const GameParams& params, const IntegratorOptions& opts, Trajectory& traj,
              std::vector<StationaryPoint> sinks, bool closure_on)
      : params_(params),
        opts_(opts),
        traj_(traj),
        sinks_(std::move(sinks)),
        detector_(params, opts.closure_tolerance),
        closure_on_(closure_on && detector_.active()) {}

  // Returns false when an event terminated the trajectory.
  bool consume(const ode::Segment& seg) {
    if (!densify(seg, 0)) return false;
    if (auto hit = detect_convergence(params_, {seg.y1.x, seg.y1.y}, sinks_, opts_)) {
      traj_.termination = Termination::Converged;
      traj_.converged_to = *hit;
      return false;
    }
    return true;
  }

 private:
  bool densify(const ode::Segment& seg, int depth) {
    if (maxnorm(seg.y0, seg.y1) <= kMaxSampleGap || depth >= 24)
      return emit({seg.t1, seg.y1.x, seg.y1.y});
    double tm = 0.5 * (seg.t0 + seg.t1);
    Vec2 ym = ode::clamp_unit_square(ode::hermite(seg, 0.5));
    Vec2 fm = vector_field(params_, {ym.x, ym.y});
    ode::Segment left{seg.t0, tm, seg.y0, ym, seg.f0, fm};
    ode::Segment right{tm, seg.t1, ym, seg.y1, fm, seg.f1};
    return densify(left, depth + 1) && densify(right, depth + 1);
  }

  bool emit(const Sample& s) {
    Sample prev = traj_.samples.back();  // copy: push_back may reallocate
    traj_.samples.push_back(s);
    if (!closure_on_) return true;
    if (auto period = detector_.feed(prev, s)) {
      // End the trajectory on the section at the detected return.
      Sample cross = detector_.last_crossing();
      traj_.samples.pop_back();
      if (cross.t > traj_.samples.back().t) traj_.samples.push_back(cross);
      traj_.termination = Termination::OrbitClosed;
      traj_.period = *period;
      return false;
    }
    return true;
  }

  static constexpr double kMaxSampleGap = 0.01;

  const GameParams& params_;
  const IntegratorOptions& opts_;
  Trajectory& traj_;
  std::vector<StationaryPoint> sinks_;
  PoincareDetector detector_;
  bool closure_on_;
};

}  // namespace

Trajectory integrate(const GameParams& params, const PopulationState& start,
                     const IntegratorOptions& opts) {
  validate_options(opts);
  if (!(start.x >= 0 && start.x <= 1 && start.y >= 0 && start.y <= 1))
    throw std::invalid_argument("integrate: start outside the closed unit square");

  std::vector<StationaryPoint> sinks;
  for (const StationaryPoint& p : stationary_points(params).points)
    if (p.stability == Stability::Sink) sinks.push_back(p);

  bool closure_on = opts.detect_closure && classify_regime(params) == Regime::OscillatoryProp1;

  Trajectory traj;
  traj.samples.push_back({0.0, start.x, start.y});

  if (auto hit = detect_convergence(params, start, sinks, opts)) {
    traj.termination = Termination::Converged;
    traj.converged_to = *hit;
    return traj;
  }

  SegmentSink sink(params, opts, traj, sinks, closure_on);
  FieldRHS rhs{params};

  if (opts.method == Method::AdaptiveRK45) {
    ode::DriverOptions dopts;
    dopts.abs_tol = opts.abs_tol;
    dopts.rel_tol = opts.rel_tol;
    dopts.boundary_clamp = opts.boundary_clamp;
    dopts.stability_cap = stability_step_cap(params);
    ode::AdaptiveDriver driver(rhs, {start.x, start.y}, 0.0, std::min(opts.step, opts.t_max),
                               dopts);
    while (driver.t() < opts.t_max) {
      auto seg = driver.advance(opts.t_max);
      if (!seg) {
        traj.termination = Termination::StepFailure;
        break;
      }
      if (!sink.consume(*seg)) break;
    }
    traj.stats.accepted = driver.accepted();
    traj.stats.rejected = driver.rejected();
    traj.stats.max_clamp = driver.max_clamp();
    return traj;
  }

  // Fixed-step RK4.
  double t = 0.0;
  Vec2 y{start.x, start.y};
  Vec2 f = rhs(y);
  while (t < opts.t_max) {
    double h = std::min(opts.step, opts.t_max - t);
    bool clipped = h < opts.step;
    Vec2 y1 = ode::rk4_step(rhs, y, h);
    if (!ode::finite(y1)) {
      traj.termination = Termination::StepFailure;
      break;
    }
    traj.stats.max_clamp = std::max(traj.stats.max_clamp, ode::unit_square_overshoot(y1));
    y1 = ode::clamp_unit_square(y1);
    Vec2 f1 = rhs(y1);
    double t1 = clipped ? opts.t_max : t + h;
    ++traj.stats.accepted;
    if (!sink.consume({t, t1, y, y1, f, f1})) return traj;
    t = t1;
    y = y1;
    f = f1;
  }
  return traj;
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::ReachedTMax: return "reached_t_max";
    case Termination::Converged: return "converged";
    case Termination::OrbitClosed: return "orbit_closed";
    case Termination::StepFailure: return "step_failure";
  }
  return "?";
}

}  // namespace replidyn
