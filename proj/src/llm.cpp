#include "pacs/llm.hpp"

#include <atomic>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#ifdef PACS_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "pacs/errors.hpp"

namespace pacs {

using json = nlohmann::json;

namespace {

std::string trimmed(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// Drops a leading "#k." step label a model may echo back.
std::string strip_step_label(std::string line, const std::string& marker) {
  if (line.rfind(marker, 0) != 0) return line;
  size_t i = marker.size();
  size_t digits = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    ++i;
    ++digits;
  }
  if (digits == 0 || i >= line.size() || line[i] != '.') return line;
  return trimmed(line.substr(i + 1));
}

std::vector<std::string> clean_lines(const std::string& raw,
                                     const std::string& marker) {
  std::vector<std::string> lines;
  std::istringstream in(raw);
  std::string line;
  while (std::getline(in, line))
    lines.push_back(strip_step_label(trimmed(line), marker));
  return lines;
}

void render_problem(std::string& out, const PromptTemplate& tpl,
                    const std::vector<std::string>& premise_texts,
                    const std::vector<FormulaPtr>& premise_logic,
                    const std::string& query_text, const FormulaPtr& query,
                    const std::vector<Thought>& chain) {
  for (size_t i = 0; i < premise_texts.size(); ++i) {
    out += "# " + premise_texts[i] + "\n";
    out += render_formula(premise_logic[i]) + "\n";
  }
  out += "# Question: " + query_text + "\n";
  out += "# " + tpl.instruction + "\n";
  out += "return " + render_formula(query) + "\n";
  out += "# Let's think step by step:\n";
  int k = 1;
  for (const auto& t : chain) {
    out += tpl.step_marker + std::to_string(k) + ". " + t.text + "\n";
    if (t.is_final)
      out += std::string("return ") + (*t.declared_answer ? "True" : "False") +
             "\n";
    else
      out += render_formula(t.formula) + "\n";
    ++k;
  }
}

std::vector<std::string> split_premise_text(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

WorkedExample example_oven() {
  WorkedExample ex;
  ex.premises = {{"If the oven is on, the kitchen is warm.",
                  parse_formula("Implies(oven_on, kitchen_warm)")}};
  ex.query_text = "Is the kitchen warm?";
  ex.query = parse_formula("kitchen_warm");
  ex.chain = {
      make_thought("The oven was left on for the roast.",
                   parse_formula("oven_on")),
      make_final("With the oven on, the kitchen must be warm.", true),
  };
  return ex;
}

WorkedExample example_ferry() {
  WorkedExample ex;
  ex.premises = {{"If the ferry ran today, the island got mail.",
                  parse_formula("Implies(ferry_ran, got_mail)")},
                 {"The island did not get mail.",
                  parse_formula("Not(got_mail)")}};
  ex.query_text = "Did the ferry run today?";
  ex.query = parse_formula("ferry_ran");
  ex.chain = {
      make_thought("No mail means the ferry cannot have run.",
                   parse_formula("Not(ferry_ran)")),
      make_final("So the ferry did not run.", false),
  };
  return ex;
}

WorkedExample example_shelter() {
  WorkedExample ex;
  ex.premises = {
      {"Every dog in the shelter was vaccinated.",
       parse_formula("ForAll(x, Implies(shelter_dog(x), vaccinated(x)))")},
      {"Rex is a dog in the shelter.", parse_formula("shelter_dog(rex)")}};
  ex.query_text = "Was Rex vaccinated?";
  ex.query = parse_formula("vaccinated(rex)");
  ex.chain = {
      make_thought("The shelter-wide rule covers Rex.",
                   parse_formula("Implies(shelter_dog(rex), vaccinated(rex))")),
      make_final("So Rex was vaccinated.", true),
  };
  return ex;
}

WorkedExample example_match() {
  WorkedExample ex;
  ex.premises = {
      {"The match lights exactly when it is struck and the box is dry.",
       parse_formula("Iff(match_lit, And(struck, box_dry))")}};
  ex.query_text = "Is the match lit?";
  ex.query = parse_formula("match_lit");
  ex.chain = {
      make_thought("The box spent the night outside in the rain.",
                   parse_formula("Not(box_dry)")),
      make_final("A wet box means no flame.", false),
  };
  return ex;
}

}  // namespace

void PromptTemplate::validate() const {
  if (few_shot.empty()) throw Error("prompt template needs few-shot examples");
  if (step_marker.empty()) throw Error("prompt template needs a step marker");
  for (const auto& ex : few_shot) {
    if (ex.premises.empty() || !ex.query || ex.chain.empty())
      throw Error("few-shot example is incomplete");
    if (!ex.chain.back().is_final || !ex.chain.back().declared_answer)
      throw Error("few-shot example must end with a return line");
    for (size_t i = 0; i + 1 < ex.chain.size(); ++i)
      if (ex.chain[i].is_final || !ex.chain[i].formula)
        throw Error("few-shot example has a malformed intermediate step");
  }
}

PromptTemplate default_prompt_template() {
  PromptTemplate tpl;
  tpl.few_shot = {example_oven(), example_ferry(), example_shelter(),
                  example_match()};
  return tpl;
}

CompletionConfig completion_config_from_env() {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  CompletionConfig config;
  config.endpoint_url = env("PACS_LLM_URL");
  if (config.endpoint_url.empty()) config.endpoint_url = env("OPENAI_BASE_URL");
  config.api_key = env("PACS_LLM_KEY");
  if (config.api_key.empty()) config.api_key = env("OPENAI_API_KEY");
  std::string model = env("PACS_LLM_MODEL");
  if (model.empty()) model = env("OPENAI_MODEL");
  if (!model.empty()) config.model_name = model;
  return config;
}

std::string build_prompt(const SamplerRequest& request,
                         const PromptTemplate& tpl) {
  tpl.validate();
  std::string out;
  for (const auto& ex : tpl.few_shot) {
    std::vector<std::string> texts;
    std::vector<FormulaPtr> logic;
    for (const auto& p : ex.premises) {
      texts.push_back(p.text);
      logic.push_back(p.logic);
    }
    render_problem(out, tpl, texts, logic, ex.query_text, ex.query, ex.chain);
    out += "\n";
  }

  std::vector<std::string> texts = split_premise_text(request.premises_text);
  if (texts.size() != request.premises_logic.size())
    throw Error("premise text lines and logic forms are misaligned: " +
                std::to_string(texts.size()) + " vs " +
                std::to_string(request.premises_logic.size()));
  render_problem(out, tpl, texts, request.premises_logic, request.query_text,
                 request.query_formula, request.chain);
  out += tpl.step_marker + std::to_string(request.chain.size() + 1) + ".";
  return out;
}

std::string truncate_generation(const std::string& raw,
                                const std::string& step_marker) {
  size_t pos = raw.find("\n" + step_marker);
  return pos == std::string::npos ? raw : raw.substr(0, pos);
}

Thought parse_generation(const std::string& raw) {
  auto lines = clean_lines(raw, "#");

  std::string text;
  for (const auto& line : lines) {
    if (line.empty() || line == "return True" || line == "return False")
      continue;
    text = line;
    break;
  }
  for (const auto& line : lines) {
    if (line == "return True") return make_final(text, true);
    if (line == "return False") return make_final(text, false);
  }
  for (const auto& line : lines) {
    if (line.empty()) continue;
    try {
      return make_thought(text, parse_formula(line));
    } catch (const ParseError&) {
    }
  }
  throw UnparseableGeneration(
      "generation has neither a logic line nor a return line: \"" +
      (raw.size() > 160 ? raw.substr(0, 160) + "..." : raw) + "\"");
}

struct LlmSampler::Impl {
  CompletionConfig config;
  PromptTemplate tpl;
  TraceWriter* trace = nullptr;
  std::string base;  // scheme://host[:port]
  std::string path;  // completions path

  void split_endpoint() {
    std::string url = config.endpoint_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    if (url.empty()) throw TransportError("no completion endpoint configured");
    size_t scheme = url.find("://");
    size_t authority = scheme == std::string::npos ? 0 : scheme + 3;
    size_t slash = url.find('/', authority);
    std::string prefix;
    if (slash == std::string::npos) {
      base = url;
      prefix = "/v1";
    } else {
      base = url.substr(0, slash);
      prefix = url.substr(slash);
    }
    const std::string tail = "/chat/completions";
    path = prefix.size() >= tail.size() &&
                   prefix.compare(prefix.size() - tail.size(), tail.size(),
                                  tail) == 0
               ? prefix
               : prefix + tail;
  }

  std::string request_body(const std::string& prompt) const {
    json body = {
        {"model", config.model_name},
        {"messages",
         json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config.temperature},
        {"max_tokens", config.max_tokens},
        {"n", 1},
        {"stop", json::array({"\n" + tpl.step_marker})},
    };
    return body.dump();
  }

  /// One completion with transport retries and unparseable resampling.
  /// Returns the thought or records the last failure.
  std::optional<Thought> one_sample(const std::string& body, int index,
                                    std::string& last_error) const {
    std::mt19937_64 jitter_rng(std::random_device{}() + index);
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
      if (attempt > 0) {
        auto jitter = std::uniform_int_distribution<int>(0, 100)(jitter_rng);
        std::this_thread::sleep_for(
            std::chrono::milliseconds((200 << (attempt - 1)) + jitter));
      }
      httplib::Client cli(base);
      cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
          config.request_timeout));
      cli.set_read_timeout(config.request_timeout);
      cli.set_write_timeout(config.request_timeout);
      httplib::Headers headers;
      if (!config.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config.api_key);

      auto res = cli.Post(path, headers, body, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "http " + std::to_string(res->status) + ": " +
                     (res->body.size() > 200 ? res->body.substr(0, 200)
                                             : res->body);
        continue;
      }
      std::string content;
      try {
        json j = json::parse(res->body);
        content = j.at("choices").at(0).at("message").at("content")
                      .get<std::string>();
      } catch (const json::exception& e) {
        last_error = std::string("malformed completion response: ") + e.what();
        continue;
      }
      if (trace)
        trace->line(json{{"event", "llm_generation"},
                         {"request_index", index},
                         {"attempt", attempt},
                         {"raw", content}}
                        .dump());
      try {
        return parse_generation(truncate_generation(content, tpl.step_marker));
      } catch (const UnparseableGeneration& e) {
        last_error = e.what();  // resample within the retry budget
      }
    }
    return std::nullopt;
  }
};

LlmSampler::LlmSampler(CompletionConfig config, PromptTemplate tpl,
                       TraceWriter* trace)
    : impl_(std::make_unique<Impl>()) {
  tpl.validate();
  impl_->config = std::move(config);
  impl_->tpl = std::move(tpl);
  impl_->trace = trace;
  if (impl_->config.max_inflight < 1)
    throw Error("max_inflight must be positive");
  impl_->split_endpoint();
}

LlmSampler::~LlmSampler() = default;

std::vector<Thought> LlmSampler::sample_candidates(
    const SamplerRequest& request) {
  if (request.n < 1) throw Error("sampler request needs n >= 1");
  if (request.n > 1 && impl_->config.temperature <= 0)
    throw Error("temperature must be positive to draw distinct candidates");

  std::string prompt = build_prompt(request, impl_->tpl);
  if (impl_->trace)
    impl_->trace->line(json{{"event", "llm_prompt"},
                            {"chain", chain_fingerprint(request.chain)},
                            {"prompt", prompt}}
                           .dump());
  std::string body = impl_->request_body(prompt);

  std::vector<std::optional<Thought>> results(request.n);
  std::vector<std::string> errors(request.n);
  std::atomic<int> next{0};
  int workers = std::min(request.n, impl_->config.max_inflight);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < request.n; i = next.fetch_add(1))
        results[i] = impl_->one_sample(body, i, errors[i]);
    });
  for (auto& t : pool) t.join();

  std::vector<Thought> thoughts;
  std::string last_error;
  for (int i = 0; i < request.n; ++i) {
    if (results[i])
      thoughts.push_back(std::move(*results[i]));
    else if (!errors[i].empty())
      last_error = errors[i];
  }
  if (thoughts.empty())
    throw TransportError("all " + std::to_string(request.n) +
                         " completion requests failed; last error: " +
                         last_error);
  return dedup_thoughts(std::move(thoughts));
}

}  // namespace pacs
