#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "replidyn/analysis.hpp"
#include "replidyn/errors.hpp"
#include "test_util.hpp"

using namespace replidyn;
using testutil::ecommerce_params;
using testutil::retail_params;

TEST_SUITE_BEGIN("analysis");

TEST_CASE("long-run outcomes of the showcase initial conditions") {
  Outcome up = long_run_outcome(ecommerce_params(), {0.35, 0.60});
  REQUIRE(up.kind == OutcomeKind::Converged);
  CHECK(up.point->kind == PointKind::Corner11);
  CHECK(up.point->stability == Stability::Sink);

  Outcome down = long_run_outcome(ecommerce_params(), {0.65, 0.15});
  REQUIRE(down.kind == OutcomeKind::Converged);
  CHECK(down.point->kind == PointKind::Corner00);

  Outcome orbit = long_run_outcome(retail_params(), {0.4, 0.3});
  REQUIRE(orbit.kind == OutcomeKind::PeriodicOrbit);
  CHECK(*orbit.period > 0.0);
  CHECK(*orbit.h_level == doctest::Approx(-20.205453189805614).epsilon(1e-13));
}

TEST_CASE("undecided is reported at the horizon, never coerced") {
  // A face start in the oscillatory regime neither closes nor converges.
  IntegratorOptions opts;
  opts.t_max = 5.0;
  Outcome out = long_run_outcome(retail_params(), {0.0, 0.5}, opts);
  CHECK(out.kind == OutcomeKind::Undecided);
  CHECK(out.t_reached == 5.0);
}

TEST_CASE("step failures propagate out of long_run_outcome") {
  IntegratorOptions opts;
  opts.abs_tol = opts.rel_tol = 1e-300;
  CHECK_THROWS_AS(long_run_outcome(retail_params(), {0.4, 0.3}, opts), StepFailureError);
}

TEST_CASE("retail basin map is periodic everywhere") {
  BasinMap map = basin_map(retail_params(), 8);
  REQUIRE(map.n == 8);
  for (const BasinCell& cell : map.cells) CHECK(cell.kind == OutcomeKind::PeriodicOrbit);
}

TEST_CASE("e-commerce basin map: labels, figure cells, connectivity") {
  const int n = 16;
  BasinMap map = basin_map(ecommerce_params(), n);

  auto cell_of = [n](double x, double y) {
    return std::pair<int, int>(static_cast<int>(x * n), static_cast<int>(y * n));
  };
  // Cells deep inside each basin. (The figure's own initial conditions sit
  // one cell from the separatrix; their labels are pinned at n=64 in the
  // acceptance suite.)
  auto [i1, j1] = cell_of(0.35, 0.60);
  REQUIRE(map.at(i1, j1).kind == OutcomeKind::Converged);
  CHECK(*map.at(i1, j1).sink == PointKind::Corner11);
  auto [i2, j2] = cell_of(0.1, 0.1);
  REQUIRE(map.at(i2, j2).kind == OutcomeKind::Converged);
  CHECK(*map.at(i2, j2).sink == PointKind::Corner00);

  auto is00 = [](const BasinCell& c) {
    return c.kind == OutcomeKind::Converged && c.sink == PointKind::Corner00;
  };
  auto is11 = [](const BasinCell& c) {
    return c.kind == OutcomeKind::Converged && c.sink == PointKind::Corner11;
  };
  CHECK(testutil::component_count(map, is00) == 1);
  CHECK(testutil::component_count(map, is11) == 1);
  // Two labels partitioning the grid, each connected: both simply connected.
  for (const BasinCell& cell : map.cells) CHECK((is00(cell) || is11(cell)));
}

TEST_CASE("basin map is deterministic across thread counts") {
  setenv("REPLIDYN_THREADS", "1", 1);
  BasinMap serial = basin_map(ecommerce_params(), 8);
  setenv("REPLIDYN_THREADS", "4", 1);
  BasinMap parallel = basin_map(ecommerce_params(), 8);
  unsetenv("REPLIDYN_THREADS");
  REQUIRE(serial.cells.size() == parallel.cells.size());
  for (std::size_t k = 0; k < serial.cells.size(); ++k) {
    CHECK(serial.cells[k].kind == parallel.cells[k].kind);
    CHECK(serial.cells[k].sink == parallel.cells[k].sink);
  }
}

TEST_CASE("interior-of-basin labels are stable under refinement") {
  const int n = 8;
  BasinMap coarse = basin_map(ecommerce_params(), n);
  BasinMap fine = basin_map(ecommerce_params(), 2 * n);
  auto label = [](const BasinCell& c) {
    return c.kind == OutcomeKind::Converged && c.sink ? static_cast<int>(*c.sink) : -1;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int l = label(coarse.at(i, j));
      bool boundary_adjacent = false;
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        int ni = i + di, nj = j + dj;
        if (ni < 0 || ni >= n || nj < 0 || nj >= n) continue;
        if (label(coarse.at(ni, nj)) != l) boundary_adjacent = true;
      }
      if (boundary_adjacent) continue;
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
          CHECK(label(fine.at(2 * i + di, 2 * j + dj)) == l);
    }
  }
}

TEST_CASE("basin cells degrade to undecided on step failure, with notes") {
  IntegratorOptions opts;
  opts.abs_tol = opts.rel_tol = 1e-300;
  BasinMap map = basin_map(ecommerce_params(), 2, opts);
  for (const BasinCell& cell : map.cells) CHECK(cell.kind == OutcomeKind::Undecided);
  CHECK(map.notes.size() == 4);
}

TEST_CASE("separatrix needs the bistable regime") {
  CHECK_THROWS_AS(separatrix(retail_params()), NoSaddleError);
}

TEST_CASE("separatrix geometry") {
  Separatrix sep = separatrix(ecommerce_params());
  REQUIRE(sep.upper.size() >= 2);
  REQUIRE(sep.lower.size() >= 2);

  // Branches run from near the source corners toward the saddle.
  CHECK(std::hypot(sep.upper.front().x - 0.0, sep.upper.front().y - 1.0) < 1e-3);
  CHECK(std::hypot(sep.lower.front().x - 1.0, sep.lower.front().y - 0.0) < 1e-3);

  auto ip = interior_point(ecommerce_params());
  CHECK(testutil::point_polyline_distance(*ip, sep.upper) <= 1.01e-6);
  CHECK(testutil::point_polyline_distance(*ip, sep.lower) <= 1.01e-6);
  CHECK(std::abs(ip->x - 10.0 / 22.0) <= 1e-12);

  for (const auto& branch : {sep.upper, sep.lower}) {
    for (const PopulationState& v : branch) {
      CHECK(v.x > 0.0);
      CHECK(v.x < 1.0);
      CHECK(v.y > 0.0);
      CHECK(v.y < 1.0);
    }
  }
}

TEST_CASE("points displaced across the separatrix part ways") {
  Separatrix sep = separatrix(ecommerce_params());
  std::vector<PopulationState> line = sep.upper;
  line.insert(line.end(), sep.lower.rbegin(), sep.lower.rend());

  int opposite = 0, total = 0;
  for (const auto& pn : testutil::sample_polyline(line, 20)) {
    PopulationState a{std::clamp(pn.p.x + 1e-3 * pn.nx, 0.0, 1.0),
                      std::clamp(pn.p.y + 1e-3 * pn.ny, 0.0, 1.0)};
    PopulationState b{std::clamp(pn.p.x - 1e-3 * pn.nx, 0.0, 1.0),
                      std::clamp(pn.p.y - 1e-3 * pn.ny, 0.0, 1.0)};
    Outcome oa = long_run_outcome(ecommerce_params(), a);
    Outcome ob = long_run_outcome(ecommerce_params(), b);
    ++total;
    if (oa.kind == OutcomeKind::Converged && ob.kind == OutcomeKind::Converged &&
        oa.point->kind != ob.point->kind)
      ++opposite;
  }
  REQUIRE(total == 20);
  CHECK(opposite >= 19);
}

TEST_CASE("bracket sign lines partition the square into constant-sign quadrants") {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 50; ++k) {
    GameParams p = (k % 2 == 0) ? testutil::random_oscillatory(rng)
                                : testutil::random_bistable(rng);
    auto ip = interior_point(p);
    REQUIRE(ip.has_value());
    ReducedCoefficients rc = reduced_coefficients(p);
    for (int s = 0; s < 40; ++s) {
      PopulationState st = testutil::random_state(rng, 1e-6);
      if (st.x == ip->x || st.y == ip->y) continue;
      Vec2 f = vector_field(p, st);
      double bx = rc.a * st.y + rc.b;
      double by = rc.c * st.x + rc.d;
      if (bx != 0.0) CHECK(std::signbit(f.x) == std::signbit(bx));
      if (by != 0.0) CHECK(std::signbit(f.y) == std::signbit(by));
    }
  }
}

TEST_CASE("H-levels are maximal at the center and decrease outward") {
  GameParams p = retail_params();
  auto ip = interior_point(p);
  double h_center = conserved_quantity(p, *ip);
  double prev = h_center;
  // Seeds along the segment from the center toward (0.05, 0.05): each lies
  // on a distinct nested orbit.
  for (int k = 1; k <= 5; ++k) {
    double u = k / 6.0;
    PopulationState s{ip->x + u * (0.05 - ip->x), ip->y + u * (0.05 - ip->y)};
    double h = conserved_quantity(p, s);
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("trajectory features: overshoot and monotone runs") {
  Trajectory down = integrate(ecommerce_params(), {0.65, 0.15});
  TrajectoryFeatures f = trajectory_features(down);
  CHECK(f.y.max.value > 0.33);
  CHECK(f.y.max.value < 0.45);
  CHECK(f.y.max.t < down.samples.back().t);  // peak happens strictly before the end
  CHECK(down.samples.back().y < 1e-6);       // then decays to 0

  Trajectory up = integrate(ecommerce_params(), {0.35, 0.60});
  TrajectoryFeatures g = trajectory_features(up);
  REQUIRE(g.y.turning_times.size() == 1);  // down, then monotone up
  CHECK(g.y.min.t == g.y.turning_times.front());
  CHECK(up.samples.back().y > 1.0 - 1e-6);
  CHECK(g.x.turning_times.empty());  // x grows monotonically
}

TEST_CASE("trajectory features of a constant trajectory") {
  IntegratorOptions opts;
  opts.t_max = 1.0;
  Trajectory traj = integrate(ecommerce_params(), {0.0, 1.0}, opts);
  TrajectoryFeatures f = trajectory_features(traj);
  CHECK(f.x.min.value == 0.0);
  CHECK(f.x.max.value == 0.0);
  CHECK(f.y.min.value == 1.0);
  CHECK(f.y.max.value == 1.0);
  CHECK(f.x.turning_times.empty());
  CHECK(f.y.turning_times.empty());
}

TEST_SUITE_END();
