#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pacs/engine.hpp"
#include "pacs/problem.hpp"
#include "pacs/rational.hpp"
#include "pacs/sampler.hpp"

namespace pacs {

/// One reasoner's stance on one proposition.
enum class Epistemic { Know, KnowNot, Unknown };

std::string to_string(Epistemic e);

/// Stances over the whole proposition universe, aligned with
/// ReasonerPopulation::propositions.
using BeliefVector = std::vector<Epistemic>;

struct Reasoner {
  BeliefVector beliefs;
  Rational weight;
};

/// Explicit finite distribution over reasoners: the simulator's ground
/// truth. Weights are normalized to sum exactly to 1 after loading.
struct ReasonerPopulation {
  std::vector<Atom> propositions;
  std::vector<Reasoner> reasoners;
  ProblemInstance problem;

  int num_props() const { return static_cast<int>(propositions.size()); }
  int prop_index(const Atom& a) const;  // -1 if absent

  /// Checks: shapes line up, weights positive and summing to 1 within
  /// 1e-9, every reasoner's beliefs consistent with the premises, and
  /// every reasoner able to resolve the query (else the chain rule and
  /// the stopping argument both break). Throws DatasetError.
  void validate() const;

  /// Rescale weights by their exact total so they sum to exactly 1.
  void normalize_weights();
};

/// Chain-rule progress: each proposition is unsampled or carries the
/// sampled stance. A sampled Unknown is information (it rules out
/// reasoners who hold a stance), so it is distinct from unsampled.
class PartialState {
public:
  PartialState() = default;
  explicit PartialState(int n) : vals_(n, -1) {}

  int size() const { return static_cast<int>(vals_.size()); }
  bool sampled(int i) const { return vals_[i] >= 0; }
  Epistemic get(int i) const { return static_cast<Epistemic>(vals_[i]); }
  void set(int i, Epistemic e) { vals_[i] = static_cast<int8_t>(e); }
  int num_sampled() const;
  bool complete() const { return num_sampled() == size(); }

  /// 2 bits per coordinate (0 unsampled, 1..3 sampled values); usable as
  /// a hash-map key for up to 32 propositions.
  std::uint64_t key() const;

  std::string str(const ReasonerPopulation& pop) const;

private:
  std::vector<int8_t> vals_;
};

/// Total weight of reasoners matching every sampled coordinate exactly.
Rational support_weight(const ReasonerPopulation& pop, const PartialState& state);

/// Exact conditional p(stance at coord | sampled coordinates so far),
/// indexed by Epistemic. Throws ImpossibleCondition on empty support.
std::array<Rational, 3> conditional(const ReasonerPopulation& pop,
                                    const PartialState& state, int coord);

/// Logical contributions of the sampled coordinates: Know(p) adds p,
/// KnowNot(p) adds Not(p), Unknown adds nothing.
std::vector<FormulaPtr> belief_formulas(const ReasonerPopulation& pop,
                                        const PartialState& state);
std::vector<FormulaPtr> belief_formulas(const ReasonerPopulation& pop,
                                        const BeliefVector& beliefs);

/// Query status under premises plus belief contributions.
TruthValue state_verdict(const ReasonerPopulation& pop, const PartialState& state);
TruthValue vector_verdict(const ReasonerPopulation& pop, const BeliefVector& beliefs);

/// The wire form of one epistemic statement as a sampled thought. An
/// Unknown stance is carried by the tautology Or(p, Not(p)): it parses,
/// constrains nothing, and decodes back uniquely.
Thought thought_for(const ReasonerPopulation& pop, int coord, Epistemic e);

/// Inverse of thought_for. Throws Error on shapes this sampler never
/// produces or atoms outside the proposition universe.
std::pair<int, Epistemic> decode_thought(const ReasonerPopulation& pop,
                                         const Thought& t);

/// Deterministic seed splitting: one stream per (seed, tag, a, b).
std::uint64_t mix_seed(std::uint64_t base, std::string_view tag,
                       std::uint64_t a = 0, std::uint64_t b = 0);

/// Sampler-contract realization of the population's chain rule: each call
/// re-derives the partial state from the request chain, then either
/// declares the entailed answer (the state already resolves the query) or
/// draws the next proposition in `order` from the exact conditional.
/// Always returns a single thought. Stateless across calls: the draw's
/// RNG stream is derived from (seed, chain fingerprint), so concurrent use
/// is deterministic under a fixed seed.
class PopulationSampler final : public Sampler {
public:
  PopulationSampler(ReasonerPopulation pop, std::vector<int> order,
                    std::uint64_t seed);

  std::vector<Thought> sample_candidates(const SamplerRequest& request) override;

  const ReasonerPopulation& population() const { return pop_; }

private:
  ReasonerPopulation pop_;
  std::vector<int> order_;
  std::uint64_t seed_;
};

}  // namespace pacs
