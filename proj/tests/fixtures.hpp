#pragma once

// Hand-checkable reasoner populations shared across the simulator,
// estimator, and harness tests. Each covers a different shape: unanimity,
// even and uneven splits, a single decisive proposition, chained
// dependencies, and non-dyadic weights. The JSON copies under
// data/populations must stay byte-for-byte equivalent in content; a
// harness test asserts that.

#include <string>
#include <utility>
#include <vector>

#include "pacs/population.hpp"
#include "pacs/rational.hpp"

namespace fixtures {

inline pacs::ReasonerPopulation population(
    std::vector<std::pair<std::string, std::string>> premises,
    std::string query_text, std::string query_logic,
    std::vector<std::string> props,
    std::vector<std::pair<std::vector<pacs::Epistemic>, pacs::Rational>>
        reasoners) {
  std::vector<pacs::Premise> ps;
  for (auto& [text, logic] : premises)
    ps.push_back({std::move(text), pacs::parse_formula(logic)});
  pacs::ReasonerPopulation pop;
  pop.problem = pacs::ProblemInstance::make(std::move(ps), std::move(query_text),
                                            pacs::parse_formula(query_logic));
  for (auto& p : props)
    pop.propositions.push_back(pacs::Atom{std::move(p), {}});
  for (auto& [beliefs, weight] : reasoners)
    pop.reasoners.push_back({std::move(beliefs), std::move(weight)});
  pop.validate();
  pop.normalize_weights();
  return pop;
}

// Acceptance probability 1: every reasoner knows the antecedent, so the
// query resolves true for all of them. The second proposition never
// matters.
inline pacs::ReasonerPopulation unanimous() {
  using enum pacs::Epistemic;
  return population(
      {{"If the door was left open, the cat got out.",
        "Implies(door_open, cat_out)"}},
      "Did the cat get out?", "cat_out", {"door_open", "stray_seen"},
      {{{Know, Know}, pacs::Rational(1, 2)},
       {{Know, KnowNot}, pacs::Rational(1, 4)},
       {{Know, Unknown}, pacs::Rational(1, 4)}});
}

// One proposition, even split. The smallest nontrivial stopping problem:
// the root value is exactly 1.
inline pacs::ReasonerPopulation split5050() {
  using enum pacs::Epistemic;
  return population(
      {{"The light is on exactly when the switch is up.",
        "Iff(switch_up, light_on)"}},
      "Is the light on?", "light_on", {"switch_up"},
      {{{Know}, pacs::Rational(1, 2)}, {{KnowNot}, pacs::Rational(1, 2)}});
}

// Acceptance probability 7/10. Sampling rain first resolves faster
// (expected 1.3 draws) than sprinkler first (1.6).
inline pacs::ReasonerPopulation split7030() {
  using enum pacs::Epistemic;
  return population(
      {{"The grass is wet exactly when it rained or the sprinkler ran.",
        "Iff(wet, Or(rain, sprinkler))"}},
      "Is the grass wet?", "wet", {"rain", "sprinkler"},
      {{{Know, Know}, pacs::Rational(2, 5)},
       {{Know, KnowNot}, pacs::Rational(3, 10)},
       {{KnowNot, KnowNot}, pacs::Rational(3, 10)}});
}

// The first proposition settles the query by itself; the second is noise.
// Optimal play stops after one draw, the reversed fixed order after two.
inline pacs::ReasonerPopulation one_prop_decides() {
  using enum pacs::Epistemic;
  return population(
      {{"The alarm sounds exactly when the sensor trips.",
        "Iff(sensor_trip, alarm)"}},
      "Does the alarm sound?", "alarm", {"sensor_trip", "battery_ok"},
      {{{Know, Know}, pacs::Rational(1, 4)},
       {{Know, KnowNot}, pacs::Rational(1, 4)},
       {{KnowNot, Know}, pacs::Rational(1, 4)},
       {{KnowNot, KnowNot}, pacs::Rational(1, 4)}});
}

// Three propositions with real interaction: a negative first draw ends
// immediately, a positive one forces more sampling. Acceptance
// probability 3/10; the forward fixed order needs 1.7 expected draws.
inline pacs::ReasonerPopulation chain_dependency() {
  using enum pacs::Epistemic;
  return population(
      {{"If the part shipped and customs cleared it, the delivery arrives.",
        "Implies(And(shipped, cleared), arrives)"},
       {"If the truck broke down, the delivery does not arrive.",
        "Implies(truck_broke, Not(arrives))"},
       {"If the part did not ship, the delivery does not arrive.",
        "Implies(Not(shipped), Not(arrives))"}},
      "Does the delivery arrive?", "arrives",
      {"shipped", "cleared", "truck_broke"},
      {{{Know, Know, KnowNot}, pacs::Rational(3, 10)},
       {{Know, KnowNot, Know}, pacs::Rational(1, 5)},
       {{KnowNot, Unknown, Know}, pacs::Rational(1, 4)},
       {{KnowNot, KnowNot, KnowNot}, pacs::Rational(1, 4)}});
}

// Non-dyadic weights: acceptance probability exactly 2/7, which no double
// represents. Also exercises an Unknown stance inside the support.
inline pacs::ReasonerPopulation sevenths() {
  using enum pacs::Epistemic;
  return population(
      {{"The launch happens exactly when the weather holds and the fuel "
        "check passes.",
        "Iff(launch, And(weather_holds, fuel_ok))"}},
      "Does the launch happen?", "launch", {"weather_holds", "fuel_ok"},
      {{{Know, Know}, pacs::Rational(2, 7)},
       {{Know, KnowNot}, pacs::Rational(4, 7)},
       {{KnowNot, Unknown}, pacs::Rational(1, 7)}});
}

inline std::vector<pacs::ReasonerPopulation> all_populations() {
  return {unanimous(),        split5050(), split7030(),
          one_prop_decides(), chain_dependency(), sevenths()};
}

}  // namespace fixtures
