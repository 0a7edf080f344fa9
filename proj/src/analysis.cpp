#include "replidyn/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "replidyn/errors.hpp"
#include "replidyn/ode.hpp"

namespace replidyn {

Outcome long_run_outcome(const GameParams& params, const PopulationState& start,
                         const IntegratorOptions& opts) {
  Trajectory traj = integrate(params, start, opts);
  const Sample& last = traj.samples.back();
  switch (traj.termination) {
    case Termination::Converged:
      return {OutcomeKind::Converged, traj.converged_to, std::nullopt, std::nullopt, last.t};
    case Termination::OrbitClosed: {
      // The orbit level is the conserved quantity at the (interior) start.
      double h = conserved_quantity(params, start);
      return {OutcomeKind::PeriodicOrbit, std::nullopt, traj.period, h, last.t};
    }
    case Termination::ReachedTMax:
      return {OutcomeKind::Undecided, std::nullopt, std::nullopt, std::nullopt, last.t};
    case Termination::StepFailure:
      throw StepFailureError("integration step underflow");
  }
  return {OutcomeKind::Undecided, std::nullopt, std::nullopt, std::nullopt, last.t};
}

namespace {

int thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  int threads = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* env = std::getenv("REPLIDYN_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) threads = static_cast<int>(v);
  }
  return threads;
}

}  // namespace

BasinMap basin_map(const GameParams& params, int n, const IntegratorOptions& opts) {
  if (n < 2) throw std::invalid_argument("basin_map: n must be >= 2");
  BasinMap map;
  map.n = n;
  map.cells.resize(static_cast<std::size_t>(n) * n);
  std::vector<std::string> cell_notes(map.cells.size());

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int idx; (idx = next.fetch_add(1)) < n * n;) {
      int i = idx / n, j = idx % n;
      BasinCell cell;
      try {
        Outcome out = long_run_outcome(params, BasinMap::center(n, i, j), opts);
        cell.kind = out.kind;
        if (out.kind == OutcomeKind::Converged) cell.sink = out.point->kind;
      } catch (const StepFailureError& e) {
        cell.kind = OutcomeKind::Undecided;
        std::ostringstream note;
        note << "cell (" << i << "," << j << "): " << e.what();
        cell_notes[idx] = note.str();
      }
      map.cells[idx] = cell;
    }
  };

  int threads = std::min(thread_cap(), n * n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (auto& note : cell_notes)
    if (!note.empty()) map.notes.push_back(std::move(note));
  return map;
}

namespace {

// Backward-time trace from a seed near the saddle until within `radius` of
// one of the target corners. Returns the densified path, seed first.
std::vector<PopulationState> backward_trace(const GameParams& params, const Vec2& seed,
                                            const std::vector<Vec2>& targets, double radius,
                                            const IntegratorOptions& opts) {
  auto rhs = [params](const Vec2& v) {
    Vec2 f = vector_field(params, {v.x, v.y});
    return Vec2{-f.x, -f.y};
  };
  ode::DriverOptions dopts;
  dopts.abs_tol = opts.abs_tol;
  dopts.rel_tol = opts.rel_tol;
  dopts.boundary_clamp = opts.boundary_clamp;
  dopts.stability_cap = stability_step_cap(params);  // same bound, sign-free
  ode::AdaptiveDriver driver(rhs, seed, 0.0, std::min(opts.step, opts.t_max), dopts);

  std::vector<PopulationState> path{{seed.x, seed.y}};
  auto near_target = [&](const Vec2& v) {
    for (const Vec2& c : targets)
      if (std::hypot(v.x - c.x, v.y - c.y) < radius) return true;
    return false;
  };

  const double max_gap = 0.01;
  while (driver.t() < opts.t_max) {
    auto seg = driver.advance(opts.t_max);
    if (!seg) throw StepFailureError("separatrix: backward integration step underflow");
    // Densify with the same Hermite bisection the forward integrator uses.
    struct Item {
      ode::Segment seg;
      int depth;
    };
    std::vector<Item> stack{{*seg, 0}};
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      double gap = std::max(std::abs(it.seg.y1.x - it.seg.y0.x),
                            std::abs(it.seg.y1.y - it.seg.y0.y));
      if (gap <= max_gap || it.depth >= 24) {
        path.push_back({it.seg.y1.x, it.seg.y1.y});
        continue;
      }
      double tm = 0.5 * (it.seg.t0 + it.seg.t1);
      Vec2 ym = ode::clamp_unit_square(ode::hermite(it.seg, 0.5));
      Vec2 fm = rhs(ym);
      // Push right first so the left half is processed first.
      stack.push_back({{tm, it.seg.t1, ym, it.seg.y1, fm, it.seg.f1}, it.depth + 1});
      stack.push_back({{it.seg.t0, tm, it.seg.y0, ym, it.seg.f0, fm}, it.depth + 1});
    }
    if (near_target(seg->y1)) break;
  }
  return path;
}

}  // namespace

Separatrix separatrix(const GameParams& params, const IntegratorOptions& opts) {
  if (classify_regime(params) != Regime::BistableProp2)
    throw NoSaddleError("separatrix requires an interior saddle (bistable regime)");
  auto ip = interior_point(params);
  if (!ip) throw NoSaddleError("separatrix: no interior stationary point");

  ReducedCoefficients rc = reduced_coefficients(params);
  // Interior Jacobian is [[0, A], [C, 0]]; the stable eigenvector of
  // eigenvalue -sqrt(AC) is (1, -sqrt(AC)/A), sloping down-right.
  double A = rc.a * ip->x * (1.0 - ip->x);
  double C = rc.c * ip->y * (1.0 - ip->y);
  double lambda = std::sqrt(A * C);
  Vec2 v{1.0, -lambda / A};
  double norm = std::hypot(v.x, v.y);
  v = {v.x / norm, v.y / norm};

  const double eps = 1e-6;
  const double corner_radius = 1e-3;
  std::vector<Vec2> sources{{0.0, 1.0}, {1.0, 0.0}};

  auto trace = [&](double sign) {
    Vec2 seed{ip->x + sign * eps * v.x, ip->y + sign * eps * v.y};
    auto path = backward_trace(params, seed, sources, corner_radius, opts);
    std::reverse(path.begin(), path.end());  // orient corner -> saddle
    return path;
  };

  Separatrix sep;
  sep.upper = trace(-1.0);  // toward (0,1)
  sep.lower = trace(+1.0);  // toward (1,0)
  return sep;
}

namespace {

// Vertex of the parabola through three samples; falls back to the middle
// point when the data is degenerate.
ExtremeValue refine_extremum(const Sample& s0, const Sample& s1, const Sample& s2,
                             double Sample::*var) {
  double t0 = s0.t, t1 = s1.t, t2 = s2.t;
  double v0 = s0.*var, v1 = s1.*var, v2 = s2.*var;
  double d01 = t1 - t0, d12 = t1 - t2;
  double num = d01 * d01 * (v1 - v2) - d12 * d12 * (v1 - v0);
  double den = d01 * (v1 - v2) - d12 * (v1 - v0);
  if (den == 0.0) return {v1, t1};
  double tv = t1 - 0.5 * num / den;
  // Lagrange evaluation at the vertex.
  double l0 = (tv - t1) * (tv - t2) / ((t0 - t1) * (t0 - t2));
  double l1 = (tv - t0) * (tv - t2) / ((t1 - t0) * (t1 - t2));
  double l2 = (tv - t0) * (tv - t1) / ((t2 - t0) * (t2 - t1));
  return {l0 * v0 + l1 * v1 + l2 * v2, tv};
}

VariableFeatures variable_features(const std::vector<Sample>& samples, double Sample::*var) {
  VariableFeatures out;
  out.min = {samples.front().*var, samples.front().t};
  out.max = out.min;
  auto consider = [&out](const ExtremeValue& e) {
    if (e.value < out.min.value) out.min = e;
    if (e.value > out.max.value) out.max = e;
  };
  consider({samples.back().*var, samples.back().t});
  for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
    double dl = samples[k].*var - samples[k - 1].*var;
    double dr = samples[k + 1].*var - samples[k].*var;
    // Strict direction change; plateaus and last-ulp jitter don't count.
    if (dl * dr < 0.0 && std::abs(dl) > 1e-12 && std::abs(dr) > 1e-12) {
      ExtremeValue e = refine_extremum(samples[k - 1], samples[k], samples[k + 1], var);
      consider(e);
      out.turning_times.push_back(e.t);
    }
  }
  return out;
}

}  // namespace

TrajectoryFeatures trajectory_features(const Trajectory& traj) {
  if (traj.samples.size() < 2)
    throw std::invalid_argument("trajectory_features: need at least 2 samples");
  return {variable_features(traj.samples, &Sample::x),
          variable_features(traj.samples, &Sample::y)};
}

const char* to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Converged: return "converged";
    case OutcomeKind::PeriodicOrbit: return "periodic";
    case OutcomeKind::Undecided: return "undecided";
  }
  return "?";
}

}  // namespace replidyn
