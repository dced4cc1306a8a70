// Acceptance gate: each invocation runs one numbered criterion and prints
// a single PASS / FAIL / SKIP line. Exit code 0 on pass or skip, 1 on
// fail. Tolerances and sample sizes are pinned here, not configurable.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "pacs/engine.hpp"
#include "pacs/errors.hpp"
#include "pacs/estimator.hpp"
#include "pacs/harness.hpp"
#include "pacs/llm.hpp"
#include "pacs/logic.hpp"
#include "pacs/population.hpp"
#include "pacs/search.hpp"
#include "pacs/simulation.hpp"

#include "fixtures.hpp"
#include "oracle.hpp"

namespace {

struct Outcome {
  bool pass = false;
  bool skip = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string normalize_wall_ms(const std::string& report) {
  static const std::regex re("\"wall_ms\":[0-9]+");
  return std::regex_replace(report, re, "\"wall_ms\":0");
}

// 1. Solver vs truth tables: truth_value, model_count, and backbone_count
// agree with brute-force enumeration on 1000 random states, under 60 s.
Outcome criterion_solver_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260816);
  auto pool = oracle::atom_pool(10);
  int mismatches = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    int nv = 1 + static_cast<int>(rng() % 10);
    std::vector<pacs::Atom> atoms(pool.begin(), pool.begin() + nv);
    pacs::Vocabulary vocab;
    for (const auto& a : atoms) vocab.add(a);
    auto state = oracle::random_consistent_state(rng, atoms, vocab, 4, 3);
    auto query = oracle::random_formula(rng, atoms, 2);
    if (pacs::model_count(state, vocab) != oracle::count(state, vocab))
      ++mismatches;
    if (pacs::backbone_count(state, vocab) != oracle::backbone(state, vocab))
      ++mismatches;
    if (pacs::truth_value(query, state, vocab) !=
        oracle::truth(query, state, vocab))
      ++mismatches;
    auto loose = state;
    loose.push_back(oracle::random_formula(rng, atoms, 2));
    if (pacs::is_satisfiable(loose, vocab) !=
        oracle::satisfiable(loose, vocab))
      ++mismatches;
  }
  double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "1000 random states vs truth tables, %d mismatches, %.1fs",
                mismatches, secs);
  return {mismatches == 0 && secs < 60.0, false, buf};
}

// 2. Score fidelity: exact components on 200 random states up to 16 atoms,
// score >= 1, and monotone non-increase along 100 fixed-vocabulary chains.
Outcome criterion_score_fidelity() {
  std::mt19937_64 rng(4472);
  auto pool = oracle::atom_pool(16);
  int mismatches = 0;
  for (int iter = 0; iter < 200; ++iter) {
    int nv = 2 + static_cast<int>(rng() % 15);
    std::vector<pacs::Atom> atoms(pool.begin(), pool.begin() + nv);
    pacs::Vocabulary vocab;
    for (const auto& a : atoms) vocab.add(a);
    auto state = oracle::random_consistent_state(rng, atoms, vocab, 4, 3);
    auto sb = pacs::score_state(state, vocab);
    std::uint64_t oc = oracle::count(state, vocab);
    int ob = oracle::backbone(state, vocab);
    bool ok = sb.model_count == oc && sb.var_count == nv &&
              sb.backbone_count == ob &&
              sb.score == oc * static_cast<std::uint64_t>(nv - ob) + 1 &&
              sb.score >= 1;
    if (!ok) ++mismatches;
  }
  int increases = 0;
  for (int chain = 0; chain < 100; ++chain) {
    int nv = 3 + static_cast<int>(rng() % 6);
    std::vector<pacs::Atom> atoms(pool.begin(), pool.begin() + nv);
    pacs::Vocabulary vocab;
    for (const auto& a : atoms) vocab.add(a);
    std::vector<pacs::FormulaPtr> state;
    std::uint64_t prev = pacs::score_state(state, vocab).score;
    int want = 3 + static_cast<int>(rng() % 4);
    int guard = 0;
    while (static_cast<int>(state.size()) < want && guard < 100) {
      ++guard;
      state.push_back(oracle::random_formula(rng, atoms, 2));
      if (!oracle::satisfiable(state, vocab)) {
        state.pop_back();
        continue;
      }
      std::uint64_t cur = pacs::score_state(state, vocab).score;
      if (cur > prev) ++increases;
      prev = cur;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "200 score breakdowns exact (%d mismatches); 100 chains, "
                "%d score increases",
                mismatches, increases);
  return {mismatches == 0 && increases == 0, false, buf};
}

// 3. Tseitin projection: counting through the CNF encoding equals direct
// truth-table counts on 500 random formulas, including inconsistent ones.
Outcome criterion_projection() {
  std::mt19937_64 rng(9016);
  auto pool = oracle::atom_pool(10);
  int mismatches = 0;
  for (int iter = 0; iter < 500; ++iter) {
    int nv = 1 + static_cast<int>(rng() % 10);
    std::vector<pacs::Atom> atoms(pool.begin(), pool.begin() + nv);
    pacs::Vocabulary vocab;
    for (const auto& a : atoms) vocab.add(a);
    std::vector<pacs::FormulaPtr> state{oracle::random_formula(rng, atoms, 3)};
    if (pacs::model_count(state, vocab) != oracle::count(state, vocab))
      ++mismatches;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "projected counts exact on 500 random formulas, %d mismatches",
                mismatches);
  return {mismatches == 0, false, buf};
}

// 4. Early stopping commutes with the verdict for every fixture population
// under four ordering policies, with exact mass equality, under 30 s.
Outcome criterion_equivalence() {
  auto t0 = std::chrono::steady_clock::now();
  int checked = 0, failures = 0;
  for (const auto& pop : fixtures::all_populations()) {
    int n = pop.num_props();
    std::vector<int> fwd(n), rev(n);
    std::iota(fwd.begin(), fwd.end(), 0);
    std::iota(rev.begin(), rev.end(), 0);
    std::reverse(rev.begin(), rev.end());
    std::vector<pacs::OrderingPolicy> policies;
    policies.push_back(pacs::OrderingPolicy::fixed(fwd));
    policies.push_back(pacs::OrderingPolicy::fixed(rev));
    policies.push_back(pacs::OrderingPolicy::random_fixed(n, 1234));
    policies.push_back(pacs::OrderingPolicy::greedy_score());
    for (const auto& policy : policies) {
      auto rep = pacs::verify_equivalence(pop, policy);
      ++checked;
      if (!rep.ok || rep.full_true_mass != rep.stopped_true_mass) ++failures;
    }
  }
  double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d population/ordering pairs certified, %d failures, %.1fs",
                checked, failures, secs);
  return {failures == 0 && secs < 30.0, false, buf};
}

// 5. Estimator consistency: 10^4 seeded early-stopped samples on the 70/30
// population land within 0.02 of the exact acceptance probability.
Outcome criterion_estimator() {
  auto pop = fixtures::split7030();
  double exact = pacs::exact_ap(pop);
  std::vector<int> fwd(pop.num_props());
  std::iota(fwd.begin(), fwd.end(), 0);
  auto policy = pacs::OrderingPolicy::fixed(fwd);
  const int k = 10000;
  int votes_true = 0, unresolved = 0;
  for (int i = 0; i < k; ++i) {
    auto r = pacs::sample_early_stopped(pop, policy, 777000 + i);
    if (r.verdict == pacs::TruthValue::True)
      ++votes_true;
    else if (r.verdict == pacs::TruthValue::Unknown)
      ++unresolved;
  }
  double ap_hat = static_cast<double>(votes_true) / k;
  bool verdict_true = ap_hat > 0.5;
  bool ok = unresolved == 0 && std::abs(ap_hat - exact) <= 0.02 &&
            verdict_true == (exact > 0.5);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "ap_hat %.4f vs exact %.1f at K=10000 (deviation %.4f), "
                "verdict %s",
                ap_hat, exact, std::abs(ap_hat - exact),
                verdict_true ? "True" : "False");
  return {ok, false, buf};
}

// 6. Stopping-time solution: hand-checkable root values on the two trivial
// populations, the solved policy at least ties every enumerated
// deterministic policy, and the simulate report emits the greedy gaps.
Outcome criterion_mdp() {
  int violations = 0;
  if (pacs::value_iteration(fixtures::split5050()).root_value !=
      pacs::Rational(1))
    ++violations;
  if (pacs::value_iteration(fixtures::one_prop_decides()).root_value !=
      pacs::Rational(1))
    ++violations;
  for (const auto& pop : fixtures::all_populations()) {
    auto sol = pacs::value_iteration(pop);
    auto opt = pacs::policy_expected_stopping_time(
        pop, pacs::OrderingPolicy::optimal(sol));
    if (opt != sol.root_value) ++violations;
    auto en = pacs::enumerate_deterministic_policies(pop);
    if (opt > en.best) ++violations;
  }
  std::string sim_path = "/tmp/pacs_acceptance_simulate.txt";
  std::string cmd = std::string(PACS_CLI) + " simulate --population " +
                    PACS_DATA_DIR "/populations/split7030.json > " + sim_path +
                    " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  std::ifstream in(sim_path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string sim = ss.str();
  bool gaps = sim.find("\"greedy_vs_optimal\"") != std::string::npos &&
              sim.find("\"greedy_vs_random\"") != std::string::npos;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "trivial roots exact, optimal <= enumerated best on 6 "
                "populations (%d violations), simulate rc=%d gaps %s",
                violations, rc, gaps ? "emitted" : "missing");
  return {violations == 0 && rc == 0 && gaps, false, buf};
}

// 7. Determinism and soundness: three scripted eval runs serialize byte-
// identically (wall clocks normalized), and every solver-entailed path
// re-verifies against a fresh entailment call on the rebuilt state.
Outcome criterion_determinism() {
  auto dataset =
      pacs::load_dataset(PACS_DATA_DIR "/datasets/synthetic12.jsonl");
  auto scripts =
      pacs::load_script(PACS_DATA_DIR "/scripts/synthetic12_script.json");
  pacs::EvalConfig cfg;
  cfg.method = pacs::Method::Pacs;
  cfg.seed = 7;
  cfg.workers = 4;
  std::string first;
  bool identical = true;
  for (int run = 0; run < 3; ++run) {
    auto rep = pacs::run_eval(dataset, cfg,
                              pacs::scripted_sampler_factory(scripts));
    std::ostringstream os;
    pacs::write_report(os, rep);
    std::string norm = normalize_wall_ms(os.str());
    if (run == 0)
      first = norm;
    else if (norm != first)
      identical = false;
  }
  int solver_paths = 0, violations = 0;
  for (const auto& rec : dataset) {
    auto problem = rec.problem();
    auto sampler = pacs::make_scripted_sampler(scripts.at(rec.id));
    pacs::SearchConfig sc = cfg.search;
    sc.random_seed = 7;
    auto paths = pacs::run_search(problem, *sampler, sc);
    for (const auto& path : paths) {
      if (path.stop_reason == pacs::StopReason::SamplerFinal) continue;
      ++solver_paths;
      std::vector<pacs::FormulaPtr> state = problem.grounded;
      for (const auto& th : path.chain) {
        if (th.is_final || !th.formula) continue;
        auto grounded = problem.ground_thought(th.formula);
        state.insert(state.end(), grounded.begin(), grounded.end());
      }
      auto vocab = pacs::vocabulary_of(state);
      vocab.add_formula(problem.query);
      auto tv = pacs::truth_value(problem.query, state, vocab);
      auto expected =
          path.answer ? pacs::TruthValue::True : pacs::TruthValue::False;
      if (tv != expected) ++violations;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "3 runs %s; %d solver-entailed paths re-verified, %d "
                "violations",
                identical ? "byte-identical" : "DIVERGED", solver_paths,
                violations);
  return {identical && solver_paths > 0 && violations == 0, false, buf};
}

// 8. Harness end-to-end: the scripted 12-record fixture scores accuracy
// 1.0, and self-consistency at K=20 on the 70/30 population answers True
// in at least 90 of 100 seeded trials.
Outcome criterion_harness() {
  auto dataset =
      pacs::load_dataset(PACS_DATA_DIR "/datasets/synthetic12.jsonl");
  auto scripts =
      pacs::load_script(PACS_DATA_DIR "/scripts/synthetic12_script.json");
  pacs::EvalConfig cfg;
  cfg.method = pacs::Method::Pacs;
  cfg.seed = 7;
  auto rep =
      pacs::run_eval(dataset, cfg, pacs::scripted_sampler_factory(scripts));
  bool clean = true;
  for (const auto& r : rep.records)
    if (!r.error.empty()) clean = false;
  bool scripted_ok = clean && rep.metrics.accuracy == 1.0;

  auto pop = fixtures::split7030();
  std::vector<pacs::DatasetRecord> ds{
      pacs::record_from_population(pop, "split7030")};
  auto factory = pacs::population_sampler_factory(pop);
  int true_verdicts = 0;
  for (int trial = 0; trial < 100; ++trial) {
    pacs::EvalConfig c;
    c.method = pacs::Method::Sc;
    c.k = 20;
    c.seed = trial;
    auto r = pacs::run_eval(ds, c, factory);
    if (r.records.at(0).verdict == pacs::Verdict::True) ++true_verdicts;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "scripted accuracy %.2f; self-consistency True in %d/100 "
                "trials (need >= 90)",
                rep.metrics.accuracy, true_verdicts);
  return {scripted_ok && true_verdicts >= 90, false, buf};
}

// 9. Live endpoint smoke: solve the bundled single-record problem against
// a configured chat-completions endpoint. Skipped when no endpoint is set.
Outcome criterion_live_llm() {
  auto cfg = pacs::completion_config_from_env();
  if (cfg.endpoint_url.empty())
    return {true, true,
            "no endpoint configured; set PACS_LLM_URL (or OPENAI_BASE_URL) "
            "to run the live check"};
  auto dataset =
      pacs::load_dataset(PACS_DATA_DIR "/datasets/bus_example.jsonl");
  auto problem = dataset.at(0).problem();
  pacs::LlmSampler sampler(cfg, pacs::default_prompt_template());
  pacs::SearchConfig sc;
  sc.n = 3;
  sc.m = 2;
  sc.max_steps = 6;
  sc.random_seed = 1;
  auto paths = pacs::run_search(problem, sampler, sc);
  int unparsed = 0;
  for (const auto& path : paths)
    for (const auto& th : path.chain)
      if (!th.is_final && !th.formula) ++unparsed;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%zu completed paths, %d intermediate thoughts without "
                "parsed logic",
                paths.size(), unparsed);
  return {!paths.empty() && unparsed == 0, false, buf};
}

Outcome run_criterion(int n) {
  switch (n) {
    case 1: return criterion_solver_oracle();
    case 2: return criterion_score_fidelity();
    case 3: return criterion_projection();
    case 4: return criterion_equivalence();
    case 5: return criterion_estimator();
    case 6: return criterion_mdp();
    case 7: return criterion_determinism();
    case 8: return criterion_harness();
    case 9: return criterion_live_llm();
    default: return {false, false, "unknown criterion"};
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1-9>\n");
    return 2;
  }
  int n = std::atoi(argv[1]);
  Outcome o;
  try {
    o = run_criterion(n);
  } catch (const std::exception& e) {
    o = {false, false, std::string("unhandled exception: ") + e.what()};
  }
  const char* label = o.skip ? "SKIP" : o.pass ? "PASS" : "FAIL";
  std::printf("%s criterion %d: %s\n", label, n, o.detail.c_str());
  return (o.pass || o.skip) ? 0 : 1;
}
