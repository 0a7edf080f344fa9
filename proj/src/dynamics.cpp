#include "replidyn/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "replidyn/errors.hpp"

namespace replidyn {

ReducedCoefficients reduced_coefficients(const GameParams& p) {
  return {p.u1 - p.u3 + p.u2 - p.u4, p.u4 - p.u2, p.mu + 2.0 * p.psi, -p.psi};
}

double consumer_bracket(const GameParams& p, double y) {
  return (p.u1 - p.u3) * y + (p.u2 - p.u4) * (y - 1.0);
}

double producer_bracket(const GameParams& p, double x) {
  return (p.psi + p.mu) * x + p.psi * (x - 1.0);
}

Vec2 vector_field(const GameParams& p, const PopulationState& s) {
  return {s.x * (1.0 - s.x) * consumer_bracket(p, s.y),
          s.y * (1.0 - s.y) * producer_bracket(p, s.x)};
}

Mat2 jacobian(const GameParams& p, const PopulationState& s) {
  ReducedCoefficients rc = reduced_coefficients(p);
  return {(1.0 - 2.0 * s.x) * consumer_bracket(p, s.y), rc.a * (s.x - s.x * s.x),
          rc.c * (s.y - s.y * s.y), (1.0 - 2.0 * s.y) * producer_bracket(p, s.x)};
}

Stability classify_stability(const EigenPair& ev, double zero_eps) {
  auto re = [zero_eps](const std::complex<double>& z) {
    return std::abs(z.real()) < zero_eps ? 0.0 : z.real();
  };
  double r1 = re(ev.first), r2 = re(ev.second);
  double i1 = ev.first.imag(), i2 = ev.second.imag();
  if (r1 < 0.0 && r2 < 0.0) return Stability::Sink;
  if (r1 > 0.0 && r2 > 0.0) return Stability::Source;
  if (i1 == 0.0 && i2 == 0.0 && r1 * r2 < 0.0) return Stability::Saddle;
  if (r1 == 0.0 && r2 == 0.0 && i1 != 0.0 && i2 != 0.0) return Stability::Center;
  return Stability::NonHyperbolicOther;
}

std::optional<PopulationState> interior_point(const GameParams& p) {
  ReducedCoefficients rc = reduced_coefficients(p);
  if (rc.c == 0.0 || rc.a == 0.0) return std::nullopt;
  double xs = -rc.d / rc.c;
  double ys = -rc.b / rc.a;
  if (xs > 0.0 && xs < 1.0 && ys > 0.0 && ys < 1.0) return PopulationState{xs, ys};
  return std::nullopt;
}

EigenPair interior_eigenvalues(const GameParams& p) {
  auto ip = interior_point(p);
  if (!ip) throw NoInteriorPointError("no interior stationary point inside (0,1)^2");
  ReducedCoefficients rc = reduced_coefficients(p);
  double disc = ip->x * (1.0 - ip->x) * ip->y * (1.0 - ip->y) * rc.c * rc.a;
  if (disc >= 0.0) {
    double r = std::sqrt(disc);
    return {std::complex<double>(r, 0.0), std::complex<double>(-r, 0.0)};
  }
  double w = std::sqrt(-disc);
  return {std::complex<double>(0.0, w), std::complex<double>(0.0, -w)};
}

namespace {

StationaryPoint make_corner(const GameParams& p, PointKind kind, double x, double y) {
  Mat2 j = jacobian(p, {x, y});
  // Corner Jacobians are diagonal, so the diagonal entries are the
  // eigenvalues; they reduce to single correctly-rounded subtractions.
  EigenPair ev{std::complex<double>(j.a11, 0.0), std::complex<double>(j.a22, 0.0)};
  return {{x, y}, kind, ev, classify_stability(ev)};
}

}  // namespace

StationaryAnalysis stationary_points(const GameParams& p) {
  StationaryAnalysis out;
  out.points.push_back(make_corner(p, PointKind::Corner00, 0.0, 0.0));
  out.points.push_back(make_corner(p, PointKind::Corner10, 1.0, 0.0));
  out.points.push_back(make_corner(p, PointKind::Corner01, 0.0, 1.0));
  out.points.push_back(make_corner(p, PointKind::Corner11, 1.0, 1.0));

  ReducedCoefficients rc = reduced_coefficients(p);
  if (rc.c == 0.0) {
    out.notes.emplace_back("DegenerateInterior: c = mu + 2 psi = 0, interior x* undefined");
    return out;
  }
  auto ip = interior_point(p);
  if (!ip) {
    std::ostringstream note;
    note << "interior point (" << -rc.d / rc.c << ", " << -rc.b / rc.a
         << ") falls outside (0,1)^2 and is omitted";
    out.notes.push_back(note.str());
    return out;
  }
  EigenPair ev = interior_eigenvalues(p);
  out.points.push_back({*ip, PointKind::Interior, ev, classify_stability(ev)});
  return out;
}

ConservedQuantity ConservedQuantity::from_params(const GameParams& p) {
  ReducedCoefficients rc = reduced_coefficients(p);
  return {rc.d, -(rc.c + rc.d), -rc.b, rc.a + rc.b};
}

double ConservedQuantity::value(const PopulationState& s) const {
  if (s.x <= 0.0 || s.x >= 1.0 || s.y <= 0.0 || s.y >= 1.0)
    throw BoundaryStateError("conserved quantity diverges on the boundary");
  return coef_ln_x * std::log(s.x) + coef_ln_1mx * std::log(1.0 - s.x) +
         coef_ln_y * std::log(s.y) + coef_ln_1my * std::log(1.0 - s.y);
}

Vec2 ConservedQuantity::gradient(const PopulationState& s) const {
  return {coef_ln_x / s.x - coef_ln_1mx / (1.0 - s.x),
          coef_ln_y / s.y - coef_ln_1my / (1.0 - s.y)};
}

double conserved_quantity(const GameParams& p, const PopulationState& s) {
  return ConservedQuantity::from_params(p).value(s);
}

const char* to_string(PointKind kind) {
  switch (kind) {
    case PointKind::Corner00: return "corner(0,0)";
    case PointKind::Corner10: return "corner(1,0)";
    case PointKind::Corner01: return "corner(0,1)";
    case PointKind::Corner11: return "corner(1,1)";
    case PointKind::Interior: return "interior";
  }
  return "?";
}

const char* to_string(Stability stability) {
  switch (stability) {
    case Stability::Sink: return "sink";
    case Stability::Source: return "source";
    case Stability::Saddle: return "saddle";
    case Stability::Center: return "center";
    case Stability::NonHyperbolicOther: return "non_hyperbolic";
  }
  return "?";
}

}  // namespace replidyn
