#pragma once

// Replicator vector field, its Jacobian, stationary points with eigenvalue
// stability classes, and the conserved quantity of the flow.
//
// The reduced system is
//   xdot = x(1-x) (a y + b),   a = u1-u3+u2-u4 > 0,  b = u4-u2 < 0
//   ydot = y(1-y) (c x + d),   c = mu+2 psi,         d = -psi

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "replidyn/game_model.hpp"

namespace replidyn {

struct Vec2 {
  double x{0};
  double y{0};
};

struct Mat2 {
  double a11, a12;
  double a21, a22;
};

struct ReducedCoefficients {
  double a;  // slope of the consumer bracket
  double b;  // intercept of the consumer bracket
  double c;  // slope of the producer bracket
  double d;  // intercept of the producer bracket
};

ReducedCoefficients reduced_coefficients(const GameParams& params);

// a*y + b, evaluated as (u1-u3)*y + (u2-u4)*(y-1) so the corner values
// y=0 and y=1 come out as single correctly-rounded subtractions.
double consumer_bracket(const GameParams& params, double y);

// c*x + d, evaluated as (psi+mu)*x + psi*(x-1), exact at x=0 and x=1.
double producer_bracket(const GameParams& params, double x);

Vec2 vector_field(const GameParams& params, const PopulationState& state);

// [[(1-2x)(a y+b), a(x-x^2)], [c(y-y^2), (1-2y)(c x+d)]]
Mat2 jacobian(const GameParams& params, const PopulationState& state);

enum class PointKind { Corner00, Corner10, Corner01, Corner11, Interior };

enum class Stability { Sink, Source, Saddle, Center, NonHyperbolicOther };

using EigenPair = std::pair<std::complex<double>, std::complex<double>>;

// Real parts with magnitude below zero_eps count as zero; the regimes make
// them exactly zero analytically, so this only guards rounding.
Stability classify_stability(const EigenPair& eigenvalues, double zero_eps = 1e-12);

struct StationaryPoint {
  PopulationState location;
  PointKind kind;
  EigenPair eigenvalues;
  Stability stability;
};

struct StationaryAnalysis {
  std::vector<StationaryPoint> points;
  std::vector<std::string> notes;  // degenerate or out-of-square interior diagnostics
};

// The four corners always; the interior point (-d/c, -b/a) when it lies
// strictly inside (0,1)^2. For valid parameters the interior always exists.
StationaryAnalysis stationary_points(const GameParams& params);

// (-d/c, -b/a) if strictly inside the open unit square, otherwise nullopt.
std::optional<PopulationState> interior_point(const GameParams& params);

// +-sqrt(x*(1-x*) y*(1-y*) c a): purely imaginary conjugates when c*a < 0,
// a real opposite-sign pair when c*a > 0. Throws NoInteriorPointError when
// the interior point is missing.
EigenPair interior_eigenvalues(const GameParams& params);

// H(x,y) = d ln x - (c+d) ln(1-x) - b ln y + (a+b) ln(1-y), constant along
// every interior trajectory. Stored by its four log coefficients.
struct ConservedQuantity {
  double coef_ln_x;
  double coef_ln_1mx;
  double coef_ln_y;
  double coef_ln_1my;

  static ConservedQuantity from_params(const GameParams& params);

  double value(const PopulationState& state) const;  // throws BoundaryStateError
  Vec2 gradient(const PopulationState& state) const;
};

double conserved_quantity(const GameParams& params, const PopulationState& state);

const char* to_string(PointKind kind);
const char* to_string(Stability stability);

}  // namespace replidyn
