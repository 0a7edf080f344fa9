#include "replidyn/game_model.hpp"

#include <cmath>

namespace replidyn {

std::pair<double, double> markups_from_primitives(const EconomicPrimitives& prim) {
  return {prim.price - prim.marginal_cost, prim.premium - prim.freight_cost};
}

GameParams params_from_primitives(double u1, double u2, double u3, double u4,
                                  const EconomicPrimitives& prim) {
  auto [psi, mu] = markups_from_primitives(prim);
  return {u1, u2, u3, u4, psi, mu};
}

std::vector<std::string> validate(const GameParams& p) {
  std::vector<std::string> violations;
  for (double v : {p.u1, p.u2, p.u3, p.u4, p.psi, p.mu}) {
    if (!std::isfinite(v)) {
      violations.emplace_back("all values finite");
      break;
    }
  }
  // Strict comparisons, no epsilon: the regime hypotheses are strict and
  // fuzzing them would misclassify parameter sets.
  if (!(p.u1 > p.u2)) violations.emplace_back("u1 > u2");
  if (!(p.u2 > p.u3)) violations.emplace_back("u2 > u3");
  if (!(p.u3 > p.u4)) violations.emplace_back("u3 > u4");
  if (!(std::abs(p.psi) > std::abs(p.mu))) violations.emplace_back("|psi| > |mu|");
  return violations;
}

MeetingProbabilities meeting_probabilities(const PopulationState& s) {
  return {s.x * s.y, s.x * (1.0 - s.y), (1.0 - s.x) * s.y, (1.0 - s.x) * (1.0 - s.y)};
}

PayoffMatrix payoff_matrix(const GameParams& p) {
  return {{p.u1, p.psi + p.mu}, {p.u4, 0.0}, {p.u3, 0.0}, {p.u2, p.psi}};
}

ExpectedPayoffs expected_payoffs(const GameParams& p, const PopulationState& s) {
  return {p.u1 * s.y + p.u4 * (1.0 - s.y),  //
          p.u3 * s.y + p.u2 * (1.0 - s.y),  //
          (p.psi + p.mu) * s.x,             //
          p.psi * (1.0 - s.x)};
}

Regime classify_regime(const GameParams& p) {
  double total = p.psi + p.mu;
  if (p.psi < total && total < 0.0) return Regime::OscillatoryProp1;
  if (total > p.psi && p.psi > 0.0) return Regime::BistableProp2;
  return Regime::OutOfScope;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::OscillatoryProp1: return "OscillatoryProp1";
    case Regime::BistableProp2: return "BistableProp2";
    case Regime::OutOfScope: return "OutOfScope";
  }
  return "?";
}

}  // namespace replidyn
