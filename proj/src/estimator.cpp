#include "pacs/estimator.hpp"

#include "pacs/errors.hpp"

namespace pacs {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "True";
    case Verdict::False:
      return "False";
    default:
      return "Abstain";
  }
}

Estimate estimate_from_votes(const std::vector<bool>& votes) {
  if (votes.empty()) throw EmptySampleSet("no votes to estimate from");
  Estimate e;
  e.k = static_cast<int>(votes.size());
  for (bool v : votes)
    (v ? e.votes_true : e.votes_false)++;
  e.ap_hat = static_cast<double>(e.votes_true) / e.k;
  if (2 * e.votes_true > e.k)
    e.verdict = Verdict::True;
  else if (2 * e.votes_true < e.k)
    e.verdict = Verdict::False;
  else
    e.verdict = Verdict::Abstain;
  return e;
}

Estimate estimate_ap(std::span<const CompletedPath> paths) {
  if (paths.empty()) throw EmptySampleSet("no completed paths to estimate from");
  std::vector<bool> votes;
  votes.reserve(paths.size());
  for (const auto& p : paths) votes.push_back(p.answer);
  return estimate_from_votes(votes);
}

Rational exact_ap_rational(const ReasonerPopulation& population) {
  Rational mass = 0;
  for (const auto& r : population.reasoners)
    if (vector_verdict(population, r.beliefs) == TruthValue::True)
      mass += r.weight;
  return mass;
}

double exact_ap(const ReasonerPopulation& population) {
  return to_double(exact_ap_rational(population));
}

}  // namespace pacs
