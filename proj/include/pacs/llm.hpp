#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "pacs/problem.hpp"
#include "pacs/sampler.hpp"
#include "pacs/search.hpp"

namespace pacs {

/// One worked problem for few-shot prompting: premises, the question,
/// and a short chain whose last thought is the final answer.
struct WorkedExample {
  std::vector<Premise> premises;
  std::string query_text;
  FormulaPtr query;
  std::vector<Thought> chain;
};

struct PromptTemplate {
  std::vector<WorkedExample> few_shot;
  std::string instruction =
      "Decide the question from the context above; each step is one line "
      "of reasoning followed by its logic form, and the last step ends "
      "with the resolved return line.";
  std::string step_marker = "#";

  /// At least one example; every example ends on a final thought and
  /// interleaves text with parseable logic. Throws Error.
  void validate() const;
};

/// Four bundled worked examples: direct entailment, refutation by
/// contrapositive, a quantified rule, and a stance-driven negative.
PromptTemplate default_prompt_template();

struct CompletionConfig {
  std::string endpoint_url;  // e.g. http://localhost:8000/v1; empty = unset
  std::string api_key;
  std::string model_name = "default";
  double temperature = 0.7;
  int max_tokens = 256;
  std::chrono::milliseconds request_timeout{30000};
  int max_retries = 2;
  int max_inflight = 4;
};

/// Endpoint settings from PACS_LLM_URL / PACS_LLM_KEY / PACS_LLM_MODEL,
/// falling back to OPENAI_BASE_URL / OPENAI_API_KEY / OPENAI_MODEL. An
/// empty endpoint_url means no endpoint is configured.
CompletionConfig completion_config_from_env();

/// Renders the few-shot prompt for a request: worked examples, then the
/// live problem's premises as comment-plus-logic pairs, the question,
/// the instruction, the goal's return line, the chain so far, and the
/// marker for the next step ("#1." on an empty chain). Pure function.
std::string build_prompt(const SamplerRequest& request,
                         const PromptTemplate& tpl);

/// Cuts a continuation at the start of the next step marker line.
std::string truncate_generation(const std::string& raw,
                                const std::string& step_marker = "#");

/// Extracts one Thought from a truncated continuation: a `return True` /
/// `return False` line makes it final; otherwise the first non-empty
/// line is the text and the first line that parses is the logic. Throws
/// UnparseableGeneration when neither exists.
Thought parse_generation(const std::string& raw);

/// The sampler contract against an OpenAI-compatible chat-completions
/// endpoint: n independent single-sample requests (concurrency capped
/// by max_inflight), each retried with backoff on transport errors and
/// resampled on unparseable generations. Returns every thought that
/// parsed; throws TransportError only when all n fail.
class LlmSampler final : public Sampler {
public:
  LlmSampler(CompletionConfig config, PromptTemplate tpl,
             TraceWriter* trace = nullptr);
  ~LlmSampler() override;

  std::vector<Thought> sample_candidates(const SamplerRequest& request) override;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pacs
