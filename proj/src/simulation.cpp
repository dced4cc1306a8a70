#include "pacs/simulation.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <set>

#include "pacs/errors.hpp"

namespace pacs {

namespace {

void check_permutation(const std::vector<int>& order) {
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i))
      throw Error("ordering is not a permutation of the propositions");
}

Epistemic draw_epistemic(const std::array<Rational, 3>& probs,
                         std::mt19937_64& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cum = 0.0;
  int last_positive = -1;
  for (int e = 0; e < 3; ++e) {
    if (probs[e] == 0) continue;
    last_positive = e;
    cum += to_double(probs[e]);
    if (u < cum) return static_cast<Epistemic>(e);
  }
  if (last_positive < 0)
    throw ImpossibleCondition("no outcome has positive probability");
  return static_cast<Epistemic>(last_positive);
}

int checked_pick(const ReasonerPopulation& pop, const OrderingPolicy& policy,
                 const PartialState& state) {
  int i = policy.pick(pop, state);
  if (i < 0 || i >= state.size() || state.sampled(i))
    throw Error("policy '" + policy.name() +
                "' picked an invalid or already sampled coordinate");
  return i;
}

std::string render_beliefs(const ReasonerPopulation& pop,
                           const BeliefVector& beliefs) {
  std::string out;
  for (size_t i = 0; i < beliefs.size(); ++i) {
    if (i) out += ", ";
    out += pop.propositions[i].str() + ":" + to_string(beliefs[i]);
  }
  return out;
}

/// Support grouped by belief vector, so duplicate reasoners pool weight.
std::map<BeliefVector, Rational> support_groups(const ReasonerPopulation& pop) {
  std::map<BeliefVector, Rational> groups;
  for (const auto& r : pop.reasoners) groups[r.beliefs] += r.weight;
  return groups;
}

struct DictatedRollout {
  PartialState partial;
  std::vector<int> picks;
  int stop_time = 0;
  TruthValue verdict = TruthValue::Unknown;
};

/// Replays the policy with every draw forced to the given vector's value.
DictatedRollout rollout_dictated(const ReasonerPopulation& pop,
                                 const OrderingPolicy& policy,
                                 const BeliefVector& beliefs) {
  DictatedRollout r;
  r.partial = PartialState(pop.num_props());
  r.verdict = state_verdict(pop, r.partial);
  while (r.verdict == TruthValue::Unknown && !r.partial.complete()) {
    int i = checked_pick(pop, policy, r.partial);
    r.picks.push_back(i);
    r.partial.set(i, beliefs[i]);
    ++r.stop_time;
    r.verdict = state_verdict(pop, r.partial);
  }
  return r;
}

}  // namespace

OrderingPolicy::OrderingPolicy(std::string name, PickFn fn)
    : name_(std::move(name)), fn_(std::move(fn)) {}

int OrderingPolicy::pick(const ReasonerPopulation& pop,
                         const PartialState& state) const {
  if (!fn_) throw Error("ordering policy is empty");
  return fn_(pop, state);
}

OrderingPolicy OrderingPolicy::fixed(std::vector<int> order) {
  check_permutation(order);
  std::string name = "fixed(";
  for (size_t i = 0; i < order.size(); ++i)
    name += (i ? "," : "") + std::to_string(order[i]);
  name += ")";
  return OrderingPolicy(
      std::move(name),
      [order = std::move(order)](const ReasonerPopulation&,
                                 const PartialState& state) {
        for (int i : order)
          if (!state.sampled(i)) return i;
        throw Error("fixed ordering exhausted: state is complete");
      });
}

OrderingPolicy OrderingPolicy::random_fixed(int n, std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  OrderingPolicy p = fixed(std::move(order));
  return OrderingPolicy("random_fixed(seed=" + std::to_string(seed) + ")",
                        [p](const ReasonerPopulation& pop,
                            const PartialState& state) {
                          return p.pick(pop, state);
                        });
}

OrderingPolicy OrderingPolicy::greedy_score() {
  return OrderingPolicy("greedy_score", greedy_pick);
}

OrderingPolicy OrderingPolicy::optimal(const MdpSolution& solution) {
  auto table = std::make_shared<const std::map<std::uint64_t, int>>(solution.policy);
  return OrderingPolicy(
      "optimal", [table](const ReasonerPopulation&, const PartialState& state) {
        auto it = table->find(state.key());
        if (it != table->end()) return it->second;
        for (int i = 0; i < state.size(); ++i)
          if (!state.sampled(i)) return i;
        throw Error("optimal policy queried on a complete state");
      });
}

OrderingPolicy OrderingPolicy::custom(std::string name, PickFn fn) {
  return OrderingPolicy(std::move(name), std::move(fn));
}

int greedy_pick(const ReasonerPopulation& pop, const PartialState& state) {
  int best_i = -1;
  Rational best_expected;
  for (int i = 0; i < state.size(); ++i) {
    if (state.sampled(i)) continue;
    auto probs = conditional(pop, state, i);
    Rational expected = 0;
    for (int e = 0; e < 3; ++e) {
      if (probs[e] == 0) continue;
      PartialState next = state;
      next.set(i, static_cast<Epistemic>(e));
      std::vector<FormulaPtr> formulas = pop.problem.grounded;
      auto contributions = belief_formulas(pop, next);
      formulas.insert(formulas.end(), contributions.begin(), contributions.end());
      Vocabulary vocab = vocabulary_of(pop.problem.grounded);
      vocab.add_formula(pop.problem.query);
      for (int j = 0; j < next.size(); ++j)
        if (next.sampled(j)) vocab.add(pop.propositions[j]);
      expected += probs[e] * Rational(score_state(formulas, vocab).score);
    }
    if (best_i < 0 || expected < best_expected) {
      best_i = i;
      best_expected = expected;
    }
  }
  if (best_i < 0) throw Error("greedy pick queried on a complete state");
  return best_i;
}

PartialState sample_full(const ReasonerPopulation& pop,
                         const OrderingPolicy& policy, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PartialState state(pop.num_props());
  while (!state.complete()) {
    int i = checked_pick(pop, policy, state);
    state.set(i, draw_epistemic(conditional(pop, state, i), rng));
  }
  return state;
}

EarlyStopResult sample_early_stopped(const ReasonerPopulation& pop,
                                     const OrderingPolicy& policy,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EarlyStopResult r;
  r.partial = PartialState(pop.num_props());
  r.verdict = state_verdict(pop, r.partial);
  while (r.verdict == TruthValue::Unknown && !r.partial.complete()) {
    int i = checked_pick(pop, policy, r.partial);
    r.partial.set(i, draw_epistemic(conditional(pop, r.partial, i), rng));
    ++r.stop_time;
    r.verdict = state_verdict(pop, r.partial);
  }
  return r;
}

EquivalenceReport verify_equivalence(const ReasonerPopulation& pop,
                                     const OrderingPolicy& policy) {
  EquivalenceReport report;
  report.policy_name = policy.name();
  report.full_true_mass = 0;
  report.stopped_true_mass = 0;
  report.expected_stop_time = 0;

  std::set<std::uint64_t> truncations;
  bool pointwise_ok = true;
  for (const auto& [beliefs, weight] : support_groups(pop)) {
    DictatedRollout first = rollout_dictated(pop, policy, beliefs);
    DictatedRollout second = rollout_dictated(pop, policy, beliefs);
    if (first.picks != second.picks)
      throw EquivalenceViolation(
          "policy '" + policy.name() +
              "' is not a deterministic function of the state: two replays "
              "of the same belief vector diverged",
          render_beliefs(pop, beliefs));

    ++report.support_size;
    truncations.insert(first.partial.key());
    TruthValue full = vector_verdict(pop, beliefs);
    if (full == TruthValue::True) report.full_true_mass += weight;
    if (first.verdict == TruthValue::True) report.stopped_true_mass += weight;
    report.expected_stop_time += weight * Rational(first.stop_time);
    if (first.verdict != full) pointwise_ok = false;
  }
  report.distinct_truncations = static_cast<int>(truncations.size());
  report.ok =
      pointwise_ok && report.full_true_mass == report.stopped_true_mass;
  return report;
}

namespace {

Rational solve_state(const ReasonerPopulation& pop, const PartialState& state,
                     MdpSolution& sol) {
  std::uint64_t key = state.key();
  auto it = sol.value.find(key);
  if (it != sol.value.end()) return it->second;
  sol.states.emplace(key, state);

  if (state_verdict(pop, state) != TruthValue::Unknown) {
    sol.value[key] = 0;
    return 0;
  }

  int best_i = -1;
  Rational best;
  for (int i = 0; i < state.size(); ++i) {
    if (state.sampled(i)) continue;
    auto probs = conditional(pop, state, i);
    Rational v = 1;
    for (int e = 0; e < 3; ++e) {
      if (probs[e] == 0) continue;
      PartialState child = state;
      child.set(i, static_cast<Epistemic>(e));
      v += probs[e] * solve_state(pop, child, sol);
    }
    if (best_i < 0 || v < best) {
      best_i = i;
      best = v;
    }
  }
  if (best_i < 0)
    throw Error("complete state with unresolved verdict: population is "
                "missing resolution guarantees");
  sol.value[key] = best;
  sol.policy[key] = best_i;
  return best;
}

}  // namespace

MdpSolution value_iteration(const ReasonerPopulation& pop) {
  MdpSolution sol;
  sol.root_value = solve_state(pop, PartialState(pop.num_props()), sol);
  return sol;
}

Rational bellman_residual(const ReasonerPopulation& pop,
                          const MdpSolution& solution) {
  Rational worst = 0;
  for (const auto& [key, state] : solution.states) {
    Rational stored = solution.value.at(key);
    Rational expected;
    if (state_verdict(pop, state) != TruthValue::Unknown) {
      expected = 0;
    } else {
      int best_i = -1;
      for (int i = 0; i < state.size(); ++i) {
        if (state.sampled(i)) continue;
        auto probs = conditional(pop, state, i);
        Rational v = 1;
        for (int e = 0; e < 3; ++e) {
          if (probs[e] == 0) continue;
          PartialState child = state;
          child.set(i, static_cast<Epistemic>(e));
          v += probs[e] * solution.value.at(child.key());
        }
        if (best_i < 0 || v < expected) {
          best_i = i;
          expected = v;
        }
      }
    }
    Rational gap = stored - expected;
    if (gap < 0) gap = -gap;
    if (gap > worst) worst = gap;
  }
  return worst;
}

Rational policy_expected_stopping_time(const ReasonerPopulation& pop,
                                       const OrderingPolicy& policy) {
  Rational total = 0;
  for (const auto& [beliefs, weight] : support_groups(pop))
    total += weight * Rational(rollout_dictated(pop, policy, beliefs).stop_time);
  return total;
}

PolicyEnumeration enumerate_deterministic_policies(const ReasonerPopulation& pop,
                                                   std::uint64_t cap) {
  PolicyEnumeration result;
  PartialState root(pop.num_props());

  std::map<std::uint64_t, TruthValue> verdicts;
  auto verdict_of = [&](const PartialState& s) {
    auto it = verdicts.find(s.key());
    if (it != verdicts.end()) return it->second;
    TruthValue v = state_verdict(pop, s);
    verdicts.emplace(s.key(), v);
    return v;
  };

  if (verdict_of(root) != TruthValue::Unknown) {
    result.count = 1;
    result.best = result.worst = 0;
    return result;
  }

  std::vector<PartialState> pending{root};
  std::set<std::uint64_t> seen{root.key()};
  std::map<std::uint64_t, int> choice;

  auto evaluate = [&] {
    std::map<std::uint64_t, Rational> memo;
    std::function<Rational(const PartialState&)> expected_time =
        [&](const PartialState& s) -> Rational {
      if (verdict_of(s) != TruthValue::Unknown) return 0;
      auto it = memo.find(s.key());
      if (it != memo.end()) return it->second;
      int i = choice.at(s.key());
      auto probs = conditional(pop, s, i);
      Rational v = 1;
      for (int e = 0; e < 3; ++e) {
        if (probs[e] == 0) continue;
        PartialState child = s;
        child.set(i, static_cast<Epistemic>(e));
        v += probs[e] * expected_time(child);
      }
      memo.emplace(s.key(), v);
      return v;
    };
    Rational t = expected_time(root);
    if (result.count == 0) {
      result.best = result.worst = t;
    } else {
      if (t < result.best) result.best = t;
      if (t > result.worst) result.worst = t;
    }
    ++result.count;
    if (result.count >= cap) result.truncated = true;
  };

  std::function<void(size_t)> dfs = [&](size_t idx) {
    if (result.truncated) return;
    if (idx == pending.size()) {
      evaluate();
      return;
    }
    PartialState state = pending[idx];
    for (int i = 0; i < state.size() && !result.truncated; ++i) {
      if (state.sampled(i)) continue;
      choice[state.key()] = i;
      size_t before = pending.size();
      std::vector<std::uint64_t> added;
      auto probs = conditional(pop, state, i);
      for (int e = 0; e < 3; ++e) {
        if (probs[e] == 0) continue;
        PartialState child = state;
        child.set(i, static_cast<Epistemic>(e));
        if (verdict_of(child) == TruthValue::Unknown &&
            !seen.count(child.key())) {
          pending.push_back(child);
          seen.insert(child.key());
          added.push_back(child.key());
        }
      }
      dfs(idx + 1);
      pending.resize(before);
      for (std::uint64_t k : added) seen.erase(k);
      choice.erase(state.key());
    }
  };
  dfs(0);
  return result;
}

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

}  // namespace pacs
