#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pacs/population.hpp"
#include "pacs/rational.hpp"

namespace pacs {

/// Exact solution of the optimal-stopping problem: for every reachable
/// partial state with positive support, the minimal expected number of
/// further draws until the query resolves, and the coordinate achieving
/// it. Maps are keyed by PartialState::key().
struct MdpSolution {
  std::map<std::uint64_t, Rational> value;
  std::map<std::uint64_t, int> policy;
  std::map<std::uint64_t, PartialState> states;
  Rational root_value;
};

/// Picks which proposition to sample next given what has been sampled.
/// All built-in policies are deterministic functions of the state.
class OrderingPolicy {
public:
  using PickFn = std::function<int(const ReasonerPopulation&, const PartialState&)>;

  OrderingPolicy() = default;
  OrderingPolicy(std::string name, PickFn fn);

  const std::string& name() const { return name_; }
  int pick(const ReasonerPopulation& pop, const PartialState& state) const;

  /// First unsampled coordinate of a fixed permutation.
  static OrderingPolicy fixed(std::vector<int> order);

  /// A fixed permutation materialized once from the seed.
  static OrderingPolicy random_fixed(int n, std::uint64_t seed);

  /// Samples the coordinate whose outcome-weighted surrogate score is
  /// lowest (ties to the smallest index).
  static OrderingPolicy greedy_score();

  /// Follows a solved stopping problem; falls back to the smallest
  /// unsampled coordinate on states outside the solution table.
  static OrderingPolicy optimal(const MdpSolution& solution);

  static OrderingPolicy custom(std::string name, PickFn fn);

private:
  std::string name_;
  PickFn fn_;
};

/// The greedy choice at one state: argmin over unsampled coordinates of
/// the expected surrogate score after sampling that coordinate, where
/// the expectation runs over the exact conditional outcome distribution
/// and each outcome is scored over the premise, query, and sampled-
/// proposition atoms.
int greedy_pick(const ReasonerPopulation& pop, const PartialState& state);

/// Draws a complete belief vector coordinate by coordinate in policy
/// order, each draw from the exact conditional given the prefix.
PartialState sample_full(const ReasonerPopulation& pop,
                         const OrderingPolicy& policy, std::uint64_t seed);

struct EarlyStopResult {
  PartialState partial;
  int stop_time = 0;
  TruthValue verdict = TruthValue::Unknown;
};

/// Same draw, but stops as soon as the sampled prefix resolves the query.
EarlyStopResult sample_early_stopped(const ReasonerPopulation& pop,
                                     const OrderingPolicy& policy,
                                     std::uint64_t seed);

struct EquivalenceReport {
  std::string policy_name;
  int support_size = 0;         // distinct belief vectors with mass
  int distinct_truncations = 0; // distinct stopped states across support
  Rational full_true_mass;
  Rational stopped_true_mass;
  Rational expected_stop_time;
  bool ok = false;
};

/// Certifies that stopping early commutes with the verdict: for every
/// belief vector in the support, replaying the policy against that
/// vector must stop at a state whose verdict equals the full vector's,
/// and the true-mass totals must agree exactly. Each replay runs twice;
/// a divergence means the policy is not a deterministic function of the
/// state and raises EquivalenceViolation.
EquivalenceReport verify_equivalence(const ReasonerPopulation& pop,
                                     const OrderingPolicy& policy);

/// Exact value iteration (memoized depth-first) over the reachable
/// positive-support states. Ties break to the smallest coordinate.
MdpSolution value_iteration(const ReasonerPopulation& pop);

/// Largest absolute one-step lookahead error across the solution table.
/// Exactly zero for a table produced by value_iteration.
Rational bellman_residual(const ReasonerPopulation& pop,
                          const MdpSolution& solution);

/// Expected number of draws until the verdict resolves under a
/// deterministic policy, exact over the population.
Rational policy_expected_stopping_time(const ReasonerPopulation& pop,
                                       const OrderingPolicy& policy);

struct PolicyEnumeration {
  std::uint64_t count = 0;
  Rational best;
  Rational worst;
  bool truncated = false;
};

/// Exhaustively enumerates deterministic state-to-coordinate policies
/// over the reachable states and evaluates each one's expected stopping
/// time. Stops early (truncated = true) once `cap` policies were seen.
PolicyEnumeration enumerate_deterministic_policies(const ReasonerPopulation& pop,
                                                   std::uint64_t cap = 200000);

/// All permutations of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> all_permutations(int n);

}  // namespace pacs
