#include "pacs/population.hpp"

#include <random>

#include "pacs/errors.hpp"

namespace pacs {

std::string to_string(Epistemic e) {
  switch (e) {
    case Epistemic::Know:
      return "Know";
    case Epistemic::KnowNot:
      return "KnowNot";
    default:
      return "Unknown";
  }
}

int ReasonerPopulation::prop_index(const Atom& a) const {
  for (size_t i = 0; i < propositions.size(); ++i)
    if (propositions[i] == a) return static_cast<int>(i);
  return -1;
}

void ReasonerPopulation::validate() const {
  if (propositions.empty()) throw DatasetError("population has no propositions");
  if (reasoners.empty()) throw DatasetError("population has no reasoners");
  for (size_t i = 0; i < propositions.size(); ++i)
    for (size_t j = i + 1; j < propositions.size(); ++j)
      if (propositions[i] == propositions[j])
        throw DatasetError("duplicate proposition: " + propositions[i].str());

  Rational total = 0;
  for (size_t r = 0; r < reasoners.size(); ++r) {
    const auto& rr = reasoners[r];
    std::string who = "reasoner " + std::to_string(r);
    if (rr.beliefs.size() != propositions.size())
      throw DatasetError(who + " has " + std::to_string(rr.beliefs.size()) +
                         " beliefs for " + std::to_string(propositions.size()) +
                         " propositions");
    if (rr.weight <= 0) throw DatasetError(who + " has non-positive weight");
    total += rr.weight;

    TruthValue tv;
    try {
      tv = vector_verdict(*this, rr.beliefs);
    } catch (const InconsistentContext&) {
      throw DatasetError(who + "'s beliefs contradict the premises");
    }
    if (tv == TruthValue::Unknown)
      throw DatasetError(who + " cannot resolve the query (not a qualified reasoner)");
  }
  Rational off = total - 1;
  if (off < 0) off = -off;
  if (off > Rational(1, 1000000000))
    throw DatasetError("weights sum to " + to_string(total) + ", expected 1");
}

void ReasonerPopulation::normalize_weights() {
  Rational total = 0;
  for (const auto& r : reasoners) total += r.weight;
  if (total == 0) throw DatasetError("population weights sum to zero");
  for (auto& r : reasoners) r.weight /= total;
}

int PartialState::num_sampled() const {
  int n = 0;
  for (int8_t v : vals_)
    if (v >= 0) ++n;
  return n;
}

std::uint64_t PartialState::key() const {
  if (vals_.size() > 32) throw Error("partial state key limited to 32 propositions");
  std::uint64_t k = 0;
  for (size_t i = 0; i < vals_.size(); ++i)
    k |= static_cast<std::uint64_t>(vals_[i] + 1) << (2 * i);
  return k;
}

std::string PartialState::str(const ReasonerPopulation& pop) const {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < size(); ++i) {
    if (!sampled(i)) continue;
    if (!first) out += ", ";
    first = false;
    out += pop.propositions[i].str() + "=" + to_string(get(i));
  }
  return out + "}";
}

namespace {

bool matches(const Reasoner& r, const PartialState& state) {
  for (int i = 0; i < state.size(); ++i)
    if (state.sampled(i) && r.beliefs[i] != state.get(i)) return false;
  return true;
}

}  // namespace

Rational support_weight(const ReasonerPopulation& pop, const PartialState& state) {
  Rational w = 0;
  for (const auto& r : pop.reasoners)
    if (matches(r, state)) w += r.weight;
  return w;
}

std::array<Rational, 3> conditional(const ReasonerPopulation& pop,
                                    const PartialState& state, int coord) {
  if (state.sampled(coord)) throw Error("coordinate already sampled");
  std::array<Rational, 3> mass = {Rational(0), Rational(0), Rational(0)};
  Rational total = 0;
  for (const auto& r : pop.reasoners) {
    if (!matches(r, state)) continue;
    mass[static_cast<int>(r.beliefs[coord])] += r.weight;
    total += r.weight;
  }
  if (total == 0)
    throw ImpossibleCondition("no reasoner matches state " + state.str(pop));
  for (auto& m : mass) m /= total;
  return mass;
}

std::vector<FormulaPtr> belief_formulas(const ReasonerPopulation& pop,
                                        const PartialState& state) {
  std::vector<FormulaPtr> out;
  for (int i = 0; i < state.size(); ++i) {
    if (!state.sampled(i)) continue;
    FormulaPtr atom = Formula::make_atom(pop.propositions[i]);
    if (state.get(i) == Epistemic::Know)
      out.push_back(atom);
    else if (state.get(i) == Epistemic::KnowNot)
      out.push_back(Formula::make_not(atom));
  }
  return out;
}

std::vector<FormulaPtr> belief_formulas(const ReasonerPopulation& pop,
                                        const BeliefVector& beliefs) {
  PartialState s(pop.num_props());
  for (int i = 0; i < pop.num_props(); ++i) s.set(i, beliefs[i]);
  return belief_formulas(pop, s);
}

namespace {

TruthValue verdict_of(const ReasonerPopulation& pop,
                      std::vector<FormulaPtr> contributions) {
  std::vector<FormulaPtr> state = pop.problem.grounded;
  state.insert(state.end(), contributions.begin(), contributions.end());
  Vocabulary vocab = vocabulary_of(state);
  vocab.add_formula(pop.problem.query);
  return truth_value(pop.problem.query, state, vocab);
}

}  // namespace

TruthValue state_verdict(const ReasonerPopulation& pop, const PartialState& state) {
  return verdict_of(pop, belief_formulas(pop, state));
}

TruthValue vector_verdict(const ReasonerPopulation& pop, const BeliefVector& beliefs) {
  return verdict_of(pop, belief_formulas(pop, beliefs));
}

Thought thought_for(const ReasonerPopulation& pop, int coord, Epistemic e) {
  const Atom& a = pop.propositions[coord];
  FormulaPtr atom = Formula::make_atom(a);
  switch (e) {
    case Epistemic::Know:
      return make_thought("Take it that " + a.str() + " holds.", atom);
    case Epistemic::KnowNot:
      return make_thought("Take it that " + a.str() + " does not hold.",
                          Formula::make_not(atom));
    default:
      return make_thought("No stance on " + a.str() + " either way.",
                          Formula::make_or({atom, Formula::make_not(atom)}));
  }
}

std::pair<int, Epistemic> decode_thought(const ReasonerPopulation& pop,
                                         const Thought& t) {
  if (t.is_final || !t.formula)
    throw Error("cannot decode a final or formula-less thought");
  const Formula& f = *t.formula;
  auto index_of = [&](const Atom& a) {
    int i = pop.prop_index(a);
    if (i < 0) throw Error("thought mentions unknown proposition " + a.str());
    return i;
  };
  if (f.kind() == Kind::Atom) return {index_of(f.atom()), Epistemic::Know};
  if (f.kind() == Kind::Not && f.operands()[0]->kind() == Kind::Atom)
    return {index_of(f.operands()[0]->atom()), Epistemic::KnowNot};
  if (f.kind() == Kind::Or && f.operands().size() == 2 &&
      f.operands()[0]->kind() == Kind::Atom &&
      f.operands()[1]->kind() == Kind::Not &&
      f.operands()[1]->operands()[0]->kind() == Kind::Atom &&
      f.operands()[0]->atom() == f.operands()[1]->operands()[0]->atom())
    return {index_of(f.operands()[0]->atom()), Epistemic::Unknown};
  throw Error("thought formula is not an epistemic statement: " +
              render_formula(t.formula));
}

std::uint64_t mix_seed(std::uint64_t base, std::string_view tag,
                       std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(base);
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  mix(a);
  mix(b);
  return h;
}

PopulationSampler::PopulationSampler(ReasonerPopulation pop,
                                     std::vector<int> order, std::uint64_t seed)
    : pop_(std::move(pop)), order_(std::move(order)), seed_(seed) {
  if (order_.empty())
    for (int i = 0; i < pop_.num_props(); ++i) order_.push_back(i);
  std::vector<char> seen(pop_.num_props(), 0);
  for (int i : order_) {
    if (i < 0 || i >= pop_.num_props() || seen[i])
      throw Error("sampler order must be a permutation of the propositions");
    seen[i] = 1;
  }
  if (static_cast<int>(order_.size()) != pop_.num_props())
    throw Error("sampler order must cover every proposition");
}

std::vector<Thought> PopulationSampler::sample_candidates(
    const SamplerRequest& request) {
  PartialState state(pop_.num_props());
  for (const auto& t : request.chain) {
    auto [coord, e] = decode_thought(pop_, t);
    if (state.sampled(coord))
      throw Error("chain samples proposition " + pop_.propositions[coord].str() +
                  " twice");
    state.set(coord, e);
  }

  TruthValue tv = state_verdict(pop_, state);
  if (tv != TruthValue::Unknown) {
    bool answer = tv == TruthValue::True;
    return {make_final(std::string("The sampled beliefs settle the query: ") +
                           (answer ? "it holds." : "it does not hold."),
                       answer)};
  }

  int coord = -1;
  for (int i : order_)
    if (!state.sampled(i)) {
      coord = i;
      break;
    }
  if (coord < 0)
    throw Error("internal: full belief vector left the query unresolved");

  auto mass = conditional(pop_, state, coord);
  std::mt19937_64 rng(mix_seed(seed_, chain_fingerprint(request.chain)));
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int pick = -1;
  for (int e = 0; e < 3; ++e) {
    if (mass[e] == 0) continue;
    pick = e;  // final positive-mass value absorbs rounding slack
    acc += to_double(mass[e]);
    if (u < acc) break;
  }
  return {thought_for(pop_, coord, static_cast<Epistemic>(pick))};
}

}  // namespace pacs
