#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pacs/logic.hpp"

namespace pacs {

/// One sampled reasoning step: a rationale line plus either a logic
/// translation (intermediate step) or a declared final answer.
struct Thought {
  std::string text;
  FormulaPtr formula;  // required when !is_final; optional on finals
  bool is_final = false;
  std::optional<bool> declared_answer;  // present iff is_final
};

Thought make_thought(std::string text, FormulaPtr formula);
Thought make_final(std::string text, bool answer, FormulaPtr formula = nullptr);

/// Everything a sampler may condition on: the problem surface forms and
/// the chain of prior (non-final) thoughts. premises_text holds one line
/// per premise, aligned with premises_logic.
struct SamplerRequest {
  std::string premises_text;
  std::vector<FormulaPtr> premises_logic;
  std::string query_text;
  FormulaPtr query_formula;
  std::vector<Thought> chain;
  int n = 1;
};

/// The engine's only access to the distribution over next epistemic
/// statements. Implementations must be safe for concurrent calls.
class Sampler {
public:
  virtual ~Sampler() = default;

  /// Returns 1..n deduplicated candidate thoughts for the given chain.
  virtual std::vector<Thought> sample_candidates(const SamplerRequest& request) = 0;
};

/// Canonical identity of a chain prefix: the canonical renderings of its
/// thought formulas joined by "; ". Empty chain -> "".
std::string chain_fingerprint(std::span<const Thought> chain);

/// Drops candidates that repeat an earlier one's formula and finality
/// (text differences do not make a candidate distinct).
std::vector<Thought> dedup_thoughts(std::vector<Thought> thoughts);

/// A replay sampler for tests: maps chain fingerprints to canned
/// candidate lists. Unknown prefixes raise SamplerExhausted; duplicate
/// fingerprints are rejected at construction.
using Script = std::vector<std::pair<std::string, std::vector<Thought>>>;

std::shared_ptr<Sampler> make_scripted_sampler(const Script& entries);

}  // namespace pacs
