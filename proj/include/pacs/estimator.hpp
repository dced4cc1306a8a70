#pragma once

#include <span>
#include <string>
#include <vector>

#include "pacs/population.hpp"
#include "pacs/rational.hpp"
#include "pacs/search.hpp"

namespace pacs {

// Three-way call on a query. Abstain is what an estimator reports when the
// vote mass lands exactly on the fence; downstream accuracy treats it as
// incorrect.
enum class Verdict { True, False, Abstain };

std::string to_string(Verdict v);

struct Estimate {
  double ap_hat = 0.0;
  int k = 0;
  Verdict verdict = Verdict::Abstain;
  int votes_true = 0;
  int votes_false = 0;
};

// Vote-share estimate from completed reasoning paths. Throws EmptySampleSet
// when given no paths.
Estimate estimate_ap(std::span<const CompletedPath> paths);

// Same estimate from raw boolean votes.
Estimate estimate_from_votes(const std::vector<bool>& votes);

// Ground-truth acceptance probability of a population: the total weight of
// reasoners whose beliefs settle the query as true.
Rational exact_ap_rational(const ReasonerPopulation& population);
double exact_ap(const ReasonerPopulation& population);

}  // namespace pacs
