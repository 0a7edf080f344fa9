#pragma once

// Generic explicit steppers over an autonomous planar right-hand side
// f : Vec2 -> Vec2. Dormand-Prince 5(4) with FSAL for adaptive work, the
// classical RK4 step for fixed-step work, and cubic Hermite interpolation
// for dense output between accepted steps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "replidyn/dynamics.hpp"

namespace replidyn::ode {

inline bool finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

inline Vec2 clamp_unit_square(const Vec2& v) {
  return {std::min(1.0, std::max(0.0, v.x)), std::min(1.0, std::max(0.0, v.y))};
}

// How far outside [0,1]^2 the point lies, in max-norm.
inline double unit_square_overshoot(const Vec2& v) {
  double ox = std::max({0.0, -v.x, v.x - 1.0});
  double oy = std::max({0.0, -v.y, v.y - 1.0});
  return std::max(ox, oy);
}

template <class RHS>
Vec2 rk4_step(const RHS& f, const Vec2& y, double h) {
  Vec2 k1 = f(y);
  Vec2 k2 = f({y.x + 0.5 * h * k1.x, y.y + 0.5 * h * k1.y});
  Vec2 k3 = f({y.x + 0.5 * h * k2.x, y.y + 0.5 * h * k2.y});
  Vec2 k4 = f({y.x + h * k3.x, y.y + h * k3.y});
  return {y.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          y.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)};
}

// One accepted step: endpoint states and derivatives, ready for Hermite
// dense output.
struct Segment {
  double t0, t1;
  Vec2 y0, y1;
  Vec2 f0, f1;
};

// Cubic Hermite evaluation at parameter u in [0,1] over a segment.
inline Vec2 hermite(const Segment& s, double u) {
  double h = s.t1 - s.t0;
  double u2 = u * u, u3 = u2 * u;
  double h00 = 2 * u3 - 3 * u2 + 1;
  double h10 = u3 - 2 * u2 + u;
  double h01 = -2 * u3 + 3 * u2;
  double h11 = u3 - u2;
  return {h00 * s.y0.x + h10 * h * s.f0.x + h01 * s.y1.x + h11 * h * s.f1.x,
          h00 * s.y0.y + h10 * h * s.f0.y + h01 * s.y1.y + h11 * h * s.f1.y};
}

struct DriverOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double max_step = 0.5;
  double min_step = 1e-13;
  bool clamp = true;            // keep accepted states inside the unit square
  double boundary_clamp = 1e-12;  // larger overshoots reject the step instead
  // Optional state-dependent step cap. Near a stiff sink the error test
  // alone can accept steps outside the method's stability interval, where
  // the iterate rattles around the equilibrium instead of settling; callers
  // supply a bound like 2.5 / (Jacobian Gershgorin radius) to prevent that.
  std::function<double(const Vec2&)> stability_cap;
};

// Dormand-Prince 5(4) driver. Pull accepted segments one at a time with
// advance(); nullopt means the controller underflowed min_step.
template <class RHS>
class AdaptiveDriver {
 public:
  AdaptiveDriver(RHS rhs, const Vec2& y0, double t0, double h0, const DriverOptions& opts)
      : rhs_(rhs), opts_(opts), t_(t0), y_(y0), k1_(rhs(y0)), h_(h0) {}

  double t() const { return t_; }
  const Vec2& y() const { return y_; }
  long accepted() const { return accepted_; }
  long rejected() const { return rejected_; }
  double max_clamp() const { return max_clamp_; }
  bool nonfinite() const { return nonfinite_; }

  std::optional<Segment> advance(double t_limit) {
    double cap = opts_.stability_cap ? opts_.stability_cap(y_) : opts_.max_step;
    while (true) {
      double h = std::min({h_, opts_.max_step, cap, t_limit - t_});
      if (h <= 0) return std::nullopt;
      bool clipped = (h < h_);

      Vec2 y5, err;
      if (!stages(h, y5, err)) {
        nonfinite_ = true;
        return std::nullopt;
      }

      double sx = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y_.x), std::abs(y5.x));
      double sy = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y_.y), std::abs(y5.y));
      double ex = err.x / sx, ey = err.y / sy;
      double en = std::sqrt(0.5 * (ex * ex + ey * ey));

      if (en <= 1.0) {
        if (opts_.clamp) {
          double over = unit_square_overshoot(y5);
          if (over > opts_.boundary_clamp) {
            // The exact flow never leaves the square; a step that does by
            // more than the clamp guard is a step-size problem.
            ++rejected_;
            h_ = h * 0.5;
            if (h_ < opts_.min_step) return std::nullopt;
            continue;
          }
          max_clamp_ = std::max(max_clamp_, over);
          y5 = clamp_unit_square(y5);
        }
        ++accepted_;
        Vec2 k_end = rhs_(y5);
        Segment seg{t_, clipped ? t_limit : t_ + h, y_, y5, k1_, k_end};
        t_ = seg.t1;
        y_ = y5;
        k1_ = k_end;
        double fac = (en == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        h_ = h * fac;
        return seg;
      }

      ++rejected_;
      double fac = std::clamp(0.9 * std::pow(en, -0.2), 0.2, 0.9);
      h_ = h * fac;
      if (h_ < opts_.min_step) return std::nullopt;
    }
  }

 private:
  // y5: 5th-order solution; err: difference against the embedded 4th order.
  bool stages(double h, Vec2& y5, Vec2& err) {
    Vec2 k1 = k1_;
    Vec2 k2 = rhs_({y_.x + h * (a21 * k1.x), y_.y + h * (a21 * k1.y)});
    Vec2 k3 = rhs_({y_.x + h * (a31 * k1.x + a32 * k2.x), y_.y + h * (a31 * k1.y + a32 * k2.y)});
    Vec2 k4 = rhs_({y_.x + h * (a41 * k1.x + a42 * k2.x + a43 * k3.x),
                    y_.y + h * (a41 * k1.y + a42 * k2.y + a43 * k3.y)});
    Vec2 k5 = rhs_({y_.x + h * (a51 * k1.x + a52 * k2.x + a53 * k3.x + a54 * k4.x),
                    y_.y + h * (a51 * k1.y + a52 * k2.y + a53 * k3.y + a54 * k4.y)});
    Vec2 k6 = rhs_({y_.x + h * (a61 * k1.x + a62 * k2.x + a63 * k3.x + a64 * k4.x + a65 * k5.x),
                    y_.y + h * (a61 * k1.y + a62 * k2.y + a63 * k3.y + a64 * k4.y + a65 * k5.y)});
    y5 = {y_.x + h * (b1 * k1.x + b3 * k3.x + b4 * k4.x + b5 * k5.x + b6 * k6.x),
          y_.y + h * (b1 * k1.y + b3 * k3.y + b4 * k4.y + b5 * k5.y + b6 * k6.y)};
    Vec2 k7 = rhs_(y5);
    err = {h * (e1 * k1.x + e3 * k3.x + e4 * k4.x + e5 * k5.x + e6 * k6.x + e7 * k7.x),
           h * (e1 * k1.y + e3 * k3.y + e4 * k4.y + e5 * k5.y + e6 * k6.y + e7 * k7.y)};
    return finite(y5) && finite(err);
  }

  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  RHS rhs_;
  DriverOptions opts_;
  double t_;
  Vec2 y_;
  Vec2 k1_;
  double h_;
  long accepted_ = 0;
  long rejected_ = 0;
  double max_clamp_ = 0;
  bool nonfinite_ = false;
};

}  // namespace replidyn::ode
