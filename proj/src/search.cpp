#include "pacs/search.hpp"

#include <algorithm>

#include <json.hpp>

#include "pacs/errors.hpp"

namespace pacs {

using json = nlohmann::json;

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::SolverEntailed:
      return "SolverEntailed";
    case StopReason::SamplerFinal:
      return "SamplerFinal";
    default:
      return "Both";
  }
}

void TraceWriter::line(const std::string& json_line) {
  std::lock_guard<std::mutex> lock(mu_);
  *os_ << json_line << '\n';
  os_->flush();
}

namespace {

json score_json(const ScoreBreakdown& s) {
  return json{{"models", s.model_count},
              {"vars", s.var_count},
              {"backbone", s.backbone_count},
              {"score", s.score}};
}

json thought_json(const Thought& t) {
  json j{{"text", t.text}};
  j["logic"] = t.formula ? json(render_formula(t.formula)) : json();
  j["final"] = t.is_final;
  j["answer"] = t.declared_answer ? json(*t.declared_answer) : json();
  return j;
}

EngineOptions engine_options(const SearchConfig& config) {
  EngineOptions opt;
  opt.counting_cap = config.counting_cap;
  return opt;
}

SamplerRequest request_for(const BeamState& state, const ProblemInstance& problem,
                           const SearchConfig& config) {
  SamplerRequest req;
  for (size_t i = 0; i < problem.premises.size(); ++i) {
    if (i) req.premises_text += '\n';
    req.premises_text += problem.premises[i].text;
    req.premises_logic.push_back(problem.premises[i].logic);
  }
  req.query_text = problem.query_text;
  req.query_formula = problem.query;
  req.chain = state.chain;
  req.n = config.n;
  return req;
}

BeamState root_state(const ProblemInstance& problem, const SearchConfig& config) {
  BeamState root;
  root.state_formulas = problem.grounded;
  root.vocab = vocabulary_of(problem.grounded);
  root.vocab.add_formula(problem.query);
  root.score_vocab = vocabulary_of(problem.grounded);
  if (config.score_vocab_includes_query)
    root.score_vocab.add_formula(problem.query);
  root.score = score_state(root.state_formulas, root.score_vocab,
                           engine_options(config));
  root.score_trace = {root.score};
  return root;
}

CompletedPath complete(const BeamState& from, Thought thought,
                       ScoreBreakdown final_score, bool answer, StopReason why,
                       bool conflict) {
  CompletedPath path;
  path.chain = from.chain;
  path.chain.push_back(std::move(thought));
  path.answer = answer;
  path.stop_reason = why;
  path.conflict = conflict;
  path.score_trace = from.score_trace;
  path.score_trace.push_back(final_score);
  path.depth = from.depth + 1;
  return path;
}

}  // namespace

Expansion expand_state(const BeamState& state, const ProblemInstance& problem,
                       Sampler& sampler, const SearchConfig& config,
                       SearchStats* stats, TraceWriter* trace, int step,
                       int beam_index) {
  Expansion out;
  SamplerRequest req = request_for(state, problem, config);
  if (stats) ++stats->sampler_calls;
  std::vector<Thought> candidates = sampler.sample_candidates(req);

  json jcands = json::array();
  auto log_candidate = [&](const Thought& t, const char* decision,
                           const ScoreBreakdown* score) {
    if (!trace) return;
    json j = thought_json(t);
    j["decision"] = decision;
    if (score) j["score"] = score_json(*score);
    jcands.push_back(std::move(j));
  };

  for (Thought& cand : candidates) {
    if (stats) ++stats->candidates_seen;

    if (cand.is_final) {
      // A declared answer ends the path. If the thought also carries a
      // formula consistent with the state, it joins the entailment check;
      // a solver verdict beats a disagreeing declaration.
      std::vector<FormulaPtr> formulas = state.state_formulas;
      Vocabulary vocab = state.vocab;
      Vocabulary score_vocab = state.score_vocab;
      if (cand.formula) {
        auto parts = problem.ground_thought(cand.formula);
        std::vector<FormulaPtr> with = formulas;
        with.insert(with.end(), parts.begin(), parts.end());
        Vocabulary v2 = vocab;
        Vocabulary sv2 = score_vocab;
        for (const auto& p : parts) {
          v2.add_formula(p);
          sv2.add_formula(p);
        }
        if (is_satisfiable(with, v2)) {
          formulas = std::move(with);
          vocab = std::move(v2);
          score_vocab = std::move(sv2);
        }
      }
      TruthValue tv = truth_value(problem.query, formulas, vocab);
      bool declared = *cand.declared_answer;
      bool answer = tv == TruthValue::Unknown ? declared : tv == TruthValue::True;
      bool conflict = tv != TruthValue::Unknown && answer != declared;
      StopReason why = tv == TruthValue::Unknown ? StopReason::SamplerFinal
                                                 : StopReason::Both;
      ScoreBreakdown fs =
          score_state(formulas, score_vocab, engine_options(config));
      log_candidate(cand, "completed", &fs);
      out.completed.push_back(
          complete(state, std::move(cand), fs, answer, why, conflict));
      continue;
    }

    auto parts = problem.ground_thought(cand.formula);
    int fresh = 0;
    Vocabulary vocab = state.vocab;
    Vocabulary score_vocab = state.score_vocab;
    for (const auto& p : parts) {
      std::vector<Atom> atoms;
      collect_atoms(p, atoms);
      for (const auto& a : atoms) {
        if (vocab.index_of(a) < 0) {
          ++fresh;
          vocab.add(a);
        }
      }
      score_vocab.add_formula(p);
    }
    if (fresh > config.max_new_atoms_per_thought) {
      if (stats) ++stats->dropped_atom_budget;
      log_candidate(cand, "dropped_atom_budget", nullptr);
      continue;
    }

    std::vector<FormulaPtr> formulas = state.state_formulas;
    formulas.insert(formulas.end(), parts.begin(), parts.end());
    if (!is_satisfiable(formulas, vocab)) {
      if (stats) ++stats->dropped_inconsistent;
      log_candidate(cand, "dropped_inconsistent", nullptr);
      continue;
    }

    TruthValue tv = truth_value(problem.query, formulas, vocab);
    ScoreBreakdown score =
        score_state(formulas, score_vocab, engine_options(config));
    if (tv != TruthValue::Unknown) {
      log_candidate(cand, "completed", &score);
      out.completed.push_back(complete(state, std::move(cand), score,
                                       tv == TruthValue::True,
                                       StopReason::SolverEntailed, false));
      continue;
    }

    BeamState next;
    next.chain = state.chain;
    next.chain.push_back(std::move(cand));
    next.state_formulas = std::move(formulas);
    next.vocab = std::move(vocab);
    next.score_vocab = std::move(score_vocab);
    next.score = score;
    next.depth = state.depth + 1;
    next.score_trace = state.score_trace;
    next.score_trace.push_back(score);
    log_candidate(next.chain.back(), "survivor", &score);
    out.survivors.push_back(std::move(next));
  }

  if (trace) {
    json j{{"event", "expand"},
           {"step", step},
           {"beam", beam_index},
           {"state", chain_fingerprint(state.chain)},
           {"state_score", score_json(state.score)},
           {"candidates", jcands}};
    trace->line(j.dump());
  }
  return out;
}

std::vector<CompletedPath> run_search(const ProblemInstance& problem,
                                      Sampler& sampler, const SearchConfig& config,
                                      TraceWriter* trace, SearchStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    return std::chrono::steady_clock::now() - t0 >= config.wall_time_limit;
  };
  SearchStats local;
  if (!stats) stats = &local;

  BeamState root = root_state(problem, config);
  if (trace)
    trace->line(json{{"event", "start"},
                     {"query", render_formula(problem.query)},
                     {"premise_score", score_json(root.score)}}
                    .dump());

  std::vector<CompletedPath> completed;
  TruthValue presolved = truth_value(problem.query, root.state_formulas, root.vocab);
  if (presolved != TruthValue::Unknown) {
    CompletedPath path;
    path.answer = presolved == TruthValue::True;
    path.stop_reason = StopReason::SolverEntailed;
    path.score_trace = {root.score};
    path.depth = 0;
    completed.push_back(std::move(path));
    if (trace)
      trace->line(json{{"event", "presolved"},
                       {"answer", completed[0].answer}}
                      .dump());
    return completed;
  }

  std::vector<BeamState> beam;
  beam.push_back(std::move(root));

  for (int step = 1; step <= config.max_steps && !beam.empty(); ++step) {
    if (out_of_time()) {
      stats->hit_time_limit = true;
      break;
    }
    ++stats->steps;
    std::vector<BeamState> pool;
    int exhausted_here = 0;
    for (size_t bi = 0; bi < beam.size(); ++bi) {
      if (out_of_time()) {
        stats->hit_time_limit = true;
        break;
      }
      try {
        Expansion ex = expand_state(beam[bi], problem, sampler, config, stats,
                                    trace, step, static_cast<int>(bi));
        for (auto& p : ex.completed) completed.push_back(std::move(p));
        for (auto& s : ex.survivors) pool.push_back(std::move(s));
      } catch (const SamplerExhausted&) {
        ++exhausted_here;
      }
    }
    if (exhausted_here == static_cast<int>(beam.size())) {
      stats->sampler_exhausted = true;
      break;
    }
    if (stats->hit_time_limit) break;

    std::stable_sort(pool.begin(), pool.end(),
                     [](const BeamState& a, const BeamState& b) {
                       if (a.score.score != b.score.score)
                         return a.score.score < b.score.score;
                       if (a.score.model_count != b.score.model_count)
                         return a.score.model_count < b.score.model_count;
                       if (a.depth != b.depth) return a.depth < b.depth;
                       return chain_fingerprint(a.chain) <
                              chain_fingerprint(b.chain);
                     });
    if (static_cast<int>(pool.size()) > config.m) {
      stats->dropped_beam += static_cast<int>(pool.size()) - config.m;
      pool.resize(config.m);
    }
    if (trace) {
      json kept = json::array();
      for (const auto& s : pool) kept.push_back(chain_fingerprint(s.chain));
      trace->line(json{{"event", "beam"}, {"step", step}, {"kept", kept}}.dump());
    }
    beam = std::move(pool);
    if (step == config.max_steps && !beam.empty()) stats->hit_step_limit = true;
  }

  if (trace)
    trace->line(json{{"event", "done"},
                     {"completed", completed.size()},
                     {"steps", stats->steps},
                     {"sampler_calls", stats->sampler_calls}}
                    .dump());
  if (completed.empty())
    throw NoPathsFound("search halted with no completed paths");
  return completed;
}

}  // namespace pacs
