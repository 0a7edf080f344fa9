#pragma once

// Two-population delivery game between consumers (Eager/Laid-back) and
// producers (Fast/Slow). Payoffs, markups, meeting probabilities and the
// regime classification that decides the phase-space topology.

#include <string>
#include <utility>
#include <vector>

namespace replidyn {

// A point of the two-population state space: x is the share of Eager
// consumers, y the share of Fast producers. Both live in [0, 1].
struct PopulationState {
  double x{0};
  double y{0};
};

// The six payoff parameters of a scenario. Valid parameter sets satisfy
// u1 > u2 > u3 > u4 and |psi| > |mu| strictly (see validate()).
struct GameParams {
  double u1{0};   // utility of an Eager consumer served fast
  double u2{0};   // utility of a Laid-back consumer served slow
  double u3{0};   // utility of a Laid-back consumer meeting a fast seller
  double u4{0};   // utility of an Eager consumer meeting a slow seller
  double psi{0};  // operating markup, price - marginal cost
  double mu{0};   // logistics markup, delivery premium - freight cost
};

// Price-level primitives the markups decompose into. Signs are free:
// negative-margin markets are a modeled case.
struct EconomicPrimitives {
  double price{0};
  double marginal_cost{0};
  double premium{0};
  double freight_cost{0};
};

// psi = price - marginal_cost, mu = premium - freight_cost.
std::pair<double, double> markups_from_primitives(const EconomicPrimitives& prim);

GameParams params_from_primitives(double u1, double u2, double u3, double u4,
                                  const EconomicPrimitives& prim);

// Checks the ordering assumptions. Returns one entry per violated
// inequality, naming it ("u1 > u2", "|psi| > |mu|", ...); empty means valid.
// Comparisons are strict with no epsilon.
std::vector<std::string> validate(const GameParams& params);

// Probabilities of each meeting type when a random consumer searches a
// random producer. Always sums to 1 up to rounding.
struct MeetingProbabilities {
  double ef;  // Eager meets Fast:     x*y
  double es;  // Eager meets Slow:     x*(1-y)
  double lf;  // Laid-back meets Fast: (1-x)*y
  double ls;  // Laid-back meets Slow: (1-x)*(1-y)
};

MeetingProbabilities meeting_probabilities(const PopulationState& state);

struct PayoffPair {
  double consumer;
  double producer;
};

// Rows are consumer strategies (E, L), columns producer strategies (F, S).
// A failed trade pays the producer exactly 0; that entry is fixed, not a
// parameter.
struct PayoffMatrix {
  PayoffPair ef;  // (u1, psi + mu)
  PayoffPair es;  // (u4, 0)
  PayoffPair lf;  // (u3, 0)
  PayoffPair ls;  // (u2, psi)
};

PayoffMatrix payoff_matrix(const GameParams& params);

// Expected payoff of each strategy against the opposing population mix.
struct ExpectedPayoffs {
  double u_eager;     // u1*y + u4*(1-y)
  double u_laidback;  // u3*y + u2*(1-y)
  double pi_fast;     // (psi+mu)*x
  double pi_slow;     // psi*(1-x)
};

ExpectedPayoffs expected_payoffs(const GameParams& params, const PopulationState& state);

// Which qualitative regime the parameters fall into:
//   OscillatoryProp1  iff psi < psi + mu < 0   (all corners saddles, interior center)
//   BistableProp2     iff psi + mu > psi > 0   (two sinks, two sources, interior saddle)
// Anything else is OutOfScope; simulation is still permitted there.
enum class Regime { OscillatoryProp1, BistableProp2, OutOfScope };

Regime classify_regime(const GameParams& params);

const char* to_string(Regime regime);

}  // namespace replidyn
