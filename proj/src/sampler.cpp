#include "pacs/sampler.hpp"

#include <map>
#include <set>

#include "pacs/errors.hpp"

namespace pacs {

Thought make_thought(std::string text, FormulaPtr formula) {
  if (!formula) throw Error("intermediate thought needs a formula");
  Thought t;
  t.text = std::move(text);
  t.formula = std::move(formula);
  return t;
}

Thought make_final(std::string text, bool answer, FormulaPtr formula) {
  Thought t;
  t.text = std::move(text);
  t.formula = std::move(formula);
  t.is_final = true;
  t.declared_answer = answer;
  return t;
}

std::string chain_fingerprint(std::span<const Thought> chain) {
  std::string fp;
  for (const auto& t : chain) {
    if (t.is_final) throw Error("chain prefixes never contain final thoughts");
    if (!t.formula) throw Error("chain thought without a formula");
    if (!fp.empty()) fp += "; ";
    fp += render_formula(t.formula);
  }
  return fp;
}

std::vector<Thought> dedup_thoughts(std::vector<Thought> thoughts) {
  std::vector<Thought> out;
  std::set<std::string> seen;
  for (auto& t : thoughts) {
    std::string key = t.is_final
                          ? std::string("final:") + (*t.declared_answer ? "T" : "F")
                          : "step";
    key += "|";
    if (t.formula) key += render_formula(t.formula);
    if (seen.insert(key).second) out.push_back(std::move(t));
  }
  return out;
}

namespace {

class ScriptedSampler final : public Sampler {
public:
  explicit ScriptedSampler(const Script& entries) {
    for (const auto& [key, candidates] : entries) {
      if (!script_.emplace(key, candidates).second)
        throw Error("duplicate script key: '" + key + "'");
      for (const auto& t : candidates) {
        if (t.is_final != t.declared_answer.has_value())
          throw Error("script candidate finality and answer disagree");
        if (!t.is_final && !t.formula)
          throw Error("script candidate lacks a formula");
      }
    }
  }

  std::vector<Thought> sample_candidates(const SamplerRequest& request) override {
    std::string fp = chain_fingerprint(request.chain);
    auto it = script_.find(fp);
    if (it == script_.end())
      throw SamplerExhausted("no scripted continuation for chain '" + fp + "'");
    std::vector<Thought> out = dedup_thoughts(it->second);
    if (static_cast<int>(out.size()) > request.n) out.resize(request.n);
    return out;
  }

private:
  std::map<std::string, std::vector<Thought>> script_;
};

}  // namespace

std::shared_ptr<Sampler> make_scripted_sampler(const Script& entries) {
  return std::make_shared<ScriptedSampler>(entries);
}

}  // namespace pacs
