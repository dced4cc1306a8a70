#include "pacs/harness.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "pacs/errors.hpp"

using namespace pacs;

namespace {

const std::string kData = PACS_DATA_DIR;

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("/tmp/pacs_harness_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string normalize_wall_ms(std::string text) {
  static const std::regex kWall("\"wall_ms\":[0-9]+");
  return std::regex_replace(text, kWall, "\"wall_ms\":0");
}

void check_population_matches(const ReasonerPopulation& loaded,
                              const ReasonerPopulation& expected) {
  REQUIRE(loaded.propositions.size() == expected.propositions.size());
  for (size_t i = 0; i < expected.propositions.size(); ++i)
    CHECK(loaded.propositions[i] == expected.propositions[i]);

  REQUIRE(loaded.reasoners.size() == expected.reasoners.size());
  for (size_t i = 0; i < expected.reasoners.size(); ++i) {
    CHECK(loaded.reasoners[i].beliefs == expected.reasoners[i].beliefs);
    CHECK(loaded.reasoners[i].weight == expected.reasoners[i].weight);
  }

  REQUIRE(loaded.problem.premises.size() == expected.problem.premises.size());
  for (size_t i = 0; i < expected.problem.premises.size(); ++i) {
    CHECK(loaded.problem.premises[i].text == expected.problem.premises[i].text);
    CHECK(render_formula(loaded.problem.premises[i].logic) ==
          render_formula(expected.problem.premises[i].logic));
  }
  CHECK(loaded.problem.query_text == expected.problem.query_text);
  CHECK(render_formula(loaded.problem.query) ==
        render_formula(expected.problem.query));
  CHECK(loaded.problem.constants == expected.problem.constants);
}

EvalConfig scripted_config() {
  EvalConfig config;
  config.method = Method::Pacs;
  config.search.n = 3;
  config.search.m = 2;
  config.search.max_steps = 8;
  config.seed = 7;
  return config;
}

}  // namespace

TEST_CASE("the bundled synthetic dataset loads completely") {
  auto records = load_dataset(kData + "/datasets/synthetic12.jsonl");
  REQUIRE(records.size() == 12);
  CHECK(records.front().id == "rec01");
  CHECK(records.back().id == "rec12");
  CHECK(records[1].label == false);
  CHECK(records[11].label == false);
  CHECK(records[3].constants == std::vector<std::string>{"dana"});

  SUBCASE("quantified premises arrive pre-grounded in the problem view") {
    ProblemInstance p = records[3].problem();
    REQUIRE(p.grounded.size() == 1);
    CHECK(render_formula(p.grounded[0]) ==
          "Implies(registered(dana), got_ballot(dana))");
  }
}

TEST_CASE("dataset validation pinpoints bad lines") {
  std::string good =
      R"({"id": "a", "premises": [{"text": "p", "logic": "p"}], )"
      R"("query_text": "q", "query_logic": "p", "label": true})";

  SUBCASE("invalid JSON") {
    auto path = write_temp("bad_json.jsonl", good + "\nnot json\n");
    CHECK_THROWS_AS(load_dataset(path), DatasetError);
    std::vector<DatasetDiagnostic> diags;
    auto records = load_dataset(path, false, &diags);
    CHECK(records.size() == 1);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].line == 2);
  }
  SUBCASE("unparseable logic") {
    auto path = write_temp(
        "bad_logic.jsonl",
        R"({"id": "a", "premises": [{"text": "p", "logic": "Implies(p"}], )"
        R"("query_text": "q", "query_logic": "p", "label": true})");
    std::vector<DatasetDiagnostic> diags;
    load_dataset(path, false, &diags);
    REQUIRE(diags.size() >= 1);
    CHECK(diags[0].line == 1);
    CHECK(diags[0].message.find("logic") != std::string::npos);
  }
  SUBCASE("missing label") {
    auto path = write_temp(
        "no_label.jsonl",
        R"({"id": "a", "premises": [{"text": "p", "logic": "p"}], )"
        R"("query_text": "q", "query_logic": "p"})");
    CHECK_THROWS_WITH_AS(load_dataset(path),
                         doctest::Contains("missing field 'label'"),
                         DatasetError);
  }
  SUBCASE("unknown field") {
    auto path = write_temp(
        "extra.jsonl",
        R"({"id": "a", "premises": [{"text": "p", "logic": "p"}], )"
        R"("query_text": "q", "query_logic": "p", "label": true, "notes": 1})");
    CHECK_THROWS_WITH_AS(load_dataset(path),
                         doctest::Contains("unknown field 'notes'"),
                         DatasetError);
  }
  SUBCASE("duplicate record id") {
    auto path = write_temp("dup.jsonl", good + "\n" + good + "\n");
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("duplicate"),
                         DatasetError);
  }
  SUBCASE("empty file warns instead of failing") {
    auto path = write_temp("empty.jsonl", "");
    std::vector<DatasetDiagnostic> diags;
    auto records = load_dataset(path, true, &diags);
    CHECK(records.empty());
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].line == 0);
    CHECK(diags[0].message.find("empty") != std::string::npos);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_dataset("/tmp/pacs_no_such_file.jsonl"), DatasetError);
  }
}

TEST_CASE("the bundled script loads and validates") {
  auto scripts = load_script(kData + "/scripts/synthetic12_script.json");
  CHECK(scripts.size() == 12);
  CHECK(scripts.at("rec06").size() == 3);
  CHECK(scripts.at("rec05").empty());
  CHECK(scripts.at("rec11")[2].first ==
        "Implies(tide_rose, ramp_submerged); Implies(moon_full, tide_rose)");
}

TEST_CASE("script validation rejects malformed entries") {
  SUBCASE("duplicate chains") {
    auto path = write_temp("dup_chain.json", R"({"records": {"a": [
      {"chain": [], "candidates": [{"text": "t", "logic": "p"}]},
      {"chain": [], "candidates": [{"text": "u", "logic": "q"}]}
    ]}})");
    CHECK_THROWS_AS(load_script(path), DatasetError);
  }
  SUBCASE("non-final candidate without logic") {
    auto path = write_temp("no_logic.json", R"({"records": {"a": [
      {"chain": [], "candidates": [{"text": "t"}]}
    ]}})");
    CHECK_THROWS_WITH_AS(load_script(path), doctest::Contains("logic"),
                         DatasetError);
  }
  SUBCASE("final candidate without answer") {
    auto path = write_temp("no_answer.json", R"({"records": {"a": [
      {"chain": [], "candidates": [{"text": "t", "final": true}]}
    ]}})");
    CHECK_THROWS_WITH_AS(load_script(path),
                         doctest::Contains("missing field 'answer'"),
                         DatasetError);
  }
  SUBCASE("answer on a non-final candidate") {
    auto path = write_temp("stray_answer.json", R"({"records": {"a": [
      {"chain": [], "candidates": [{"text": "t", "logic": "p", "answer": true}]}
    ]}})");
    CHECK_THROWS_AS(load_script(path), DatasetError);
  }
}

TEST_CASE("population files mirror the in-code fixtures exactly") {
  check_population_matches(load_population(kData + "/populations/unanimous.json"),
                           fixtures::unanimous());
  check_population_matches(load_population(kData + "/populations/split5050.json"),
                           fixtures::split5050());
  check_population_matches(load_population(kData + "/populations/split7030.json"),
                           fixtures::split7030());
  check_population_matches(
      load_population(kData + "/populations/one_prop_decides.json"),
      fixtures::one_prop_decides());
  check_population_matches(
      load_population(kData + "/populations/chain_dependency.json"),
      fixtures::chain_dependency());
  check_population_matches(load_population(kData + "/populations/sevenths.json"),
                           fixtures::sevenths());
}

TEST_CASE("population loading accepts numeric weights and rejects junk") {
  SUBCASE("plain numbers normalize to an exact unit sum") {
    auto path = write_temp("num_weights.json", R"json({
      "premises": [{"text": "p iff q", "logic": "Iff(p, q)"}],
      "query_text": "q?", "query_logic": "q",
      "propositions": ["p"],
      "reasoners": [{"beliefs": ["Know"], "weight": 0.25},
                    {"beliefs": ["KnowNot"], "weight": 0.75}]})json");
    auto pop = load_population(path);
    CHECK(pop.reasoners[0].weight + pop.reasoners[1].weight == Rational(1));
    CHECK(pop.reasoners[0].weight == Rational(1, 4));
  }
  SUBCASE("a non-atom proposition is rejected") {
    auto path = write_temp("bad_prop.json", R"json({
      "premises": [{"text": "p iff q", "logic": "Iff(p, q)"}],
      "query_text": "q?", "query_logic": "q",
      "propositions": ["Not(p)"],
      "reasoners": [{"beliefs": ["Know"], "weight": 1}]})json");
    CHECK_THROWS_WITH_AS(load_population(path),
                         doctest::Contains("single atom"), DatasetError);
  }
  SUBCASE("an unknown stance is rejected") {
    auto path = write_temp("bad_stance.json", R"json({
      "premises": [{"text": "p iff q", "logic": "Iff(p, q)"}],
      "query_text": "q?", "query_logic": "q",
      "propositions": ["p"],
      "reasoners": [{"beliefs": ["Believes"], "weight": 1}]})json");
    CHECK_THROWS_WITH_AS(load_population(path),
                         doctest::Contains("unknown stance"), DatasetError);
  }
}

TEST_CASE("a population projects to a one-record dataset") {
  auto rec = record_from_population(fixtures::split7030(), "wet_grass");
  CHECK(rec.id == "wet_grass");
  CHECK(rec.label == true);  // acceptance probability 7/10
  CHECK(render_formula(rec.query_logic) == "wet");
  CHECK(rec.premises.size() == 1);

  // At exactly 1/2 the majority answer is False (strictly-greater rule).
  CHECK(record_from_population(fixtures::split5050(), "x").label == false);
}

TEST_CASE("wilson intervals bracket the sample proportion") {
  auto [low, high] = wilson_interval(10, 10);
  CHECK(low == doctest::Approx(1.0 / 1.38416).epsilon(1e-12));
  CHECK(high == doctest::Approx(1.0).epsilon(1e-12));

  auto [low0, high0] = wilson_interval(0, 10);
  CHECK(low0 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(high0 == doctest::Approx(1.0 - 1.0 / 1.38416).epsilon(1e-12));

  auto [low7, high7] = wilson_interval(7, 10);
  CHECK(low7 < 0.7);
  CHECK(high7 > 0.7);
  CHECK_THROWS_AS(wilson_interval(1, 0), Error);
  CHECK_THROWS_AS(wilson_interval(11, 10), Error);
}

TEST_CASE("metrics aggregate per-record rows") {
  RecordResult a;
  a.label = true;
  a.verdict = Verdict::True;
  a.correct = true;
  a.votes_true = 2;
  a.path_depths = {4, 6};
  a.sampler_calls = 5;

  RecordResult b;
  b.label = false;
  b.verdict = Verdict::False;
  b.correct = true;
  b.votes_false = 1;
  b.path_depths = {3};
  b.sampler_calls = 3;

  RecordResult c;  // abstained, and never voted the gold answer
  c.label = true;
  c.verdict = Verdict::Abstain;
  c.votes_false = 1;
  c.path_depths = {2};
  c.sampler_calls = 2;

  auto m = compute_metrics({a, b, c});
  CHECK(m.accuracy == doctest::Approx(2.0 / 3));
  CHECK(m.ci_low <= m.accuracy);
  CHECK(m.ci_high >= m.accuracy);
  CHECK(m.never_correct_rate == doctest::Approx(1.0 / 3));
  CHECK(m.mean_path_length == doctest::Approx(15.0 / 4));
  CHECK(m.mean_sampler_calls == doctest::Approx(10.0 / 3));

  CHECK(compute_metrics({a, b}).mean_path_length == doctest::Approx(13.0 / 3));
  CHECK(compute_metrics({a, b}).never_correct_rate == 0.0);
  CHECK_THROWS_AS(compute_metrics({}), Error);
}

TEST_CASE("scripted search evaluation solves the whole fixture") {
  auto records = load_dataset(kData + "/datasets/synthetic12.jsonl");
  auto factory =
      scripted_sampler_factory(load_script(kData + "/scripts/synthetic12_script.json"));
  auto report = run_eval(records, scripted_config(), factory);

  REQUIRE(report.records.size() == 12);
  for (const auto& r : report.records) {
    CAPTURE(r.id);
    CHECK(r.correct);
    CHECK(r.error.empty());
  }
  CHECK(report.metrics.accuracy == 1.0);
  CHECK(report.metrics.never_correct_rate == 0.0);

  SUBCASE("per-record texture matches the fixture design") {
    const auto& presolved = report.records[4];  // rec05
    CHECK(presolved.sampler_calls == 0);
    CHECK(presolved.path_depths == std::vector<int>{0});
    CHECK(presolved.stop_reasons == std::vector<std::string>{"SolverEntailed"});

    const auto& final_only = report.records[7];  // rec08
    CHECK(final_only.stop_reasons == std::vector<std::string>{"SamplerFinal"});

    const auto& beam = report.records[5];  // rec06: two symmetric completions
    CHECK(beam.k == 2);
    CHECK(beam.votes_true == 2);
    CHECK(beam.path_depths == std::vector<int>{2, 2});

    const auto& three_step = report.records[10];  // rec11
    CHECK(three_step.path_depths == std::vector<int>{3});
  }

  SUBCASE("worker count changes nothing but timing") {
    auto parallel_config = scripted_config();
    parallel_config.workers = 4;
    auto parallel = run_eval(records, parallel_config, factory);
    REQUIRE(parallel.records.size() == report.records.size());
    for (size_t i = 0; i < report.records.size(); ++i) {
      CHECK(parallel.records[i].id == report.records[i].id);
      CHECK(parallel.records[i].verdict == report.records[i].verdict);
      CHECK(parallel.records[i].ap_hat == report.records[i].ap_hat);
      CHECK(parallel.records[i].path_depths == report.records[i].path_depths);
      CHECK(parallel.records[i].sampler_calls == report.records[i].sampler_calls);
    }
  }
}

TEST_CASE("report lines are stable, structured, and recomputable") {
  auto records = load_dataset(kData + "/datasets/synthetic12.jsonl");
  auto factory =
      scripted_sampler_factory(load_script(kData + "/scripts/synthetic12_script.json"));

  std::ostringstream first, second;
  write_report(first, run_eval(records, scripted_config(), factory));
  write_report(second, run_eval(records, scripted_config(), factory));
  CHECK(normalize_wall_ms(first.str()) == normalize_wall_ms(second.str()));

  std::istringstream lines(first.str());
  std::string line;
  int record_lines = 0, correct_from_rows = 0;
  nlohmann::json metrics;
  bool first_line = true;
  while (std::getline(lines, line)) {
    nlohmann::json j = nlohmann::json::parse(line);
    if (first_line) {
      CHECK(j["type"] == "run");
      CHECK(j["method"] == "pacs");
      CHECK(j["dataset_size"] == 12);
      first_line = false;
    }
    if (j["type"] == "record") {
      ++record_lines;
      correct_from_rows += j["correct"].get<bool>() ? 1 : 0;
    }
    if (j["type"] == "metrics") metrics = j;
  }
  CHECK(record_lines == 12);
  REQUIRE(!metrics.is_null());
  CHECK(metrics["accuracy"].get<double>() ==
        doctest::Approx(correct_from_rows / 12.0));
}

TEST_CASE("missing scripts are per-record failures, not batch aborts") {
  auto records = load_dataset(kData + "/datasets/synthetic12.jsonl");
  ScriptMap partial{
      {"rec01",
       {{"", {make_thought("The fuse certainly blew.", parse_formula("fuse_blew"))}}}}};
  auto report = run_eval({records[0], records[1]}, scripted_config(),
                         scripted_sampler_factory(std::move(partial)));
  REQUIRE(report.records.size() == 2);
  CHECK(report.records[0].correct);
  CHECK(report.records[1].verdict == Verdict::Abstain);
  CHECK(report.records[1].error.find("no script") != std::string::npos);
  CHECK(report.metrics.accuracy == doctest::Approx(0.5));
}

TEST_CASE("self-consistency on a population majority-votes the truth") {
  auto pop = fixtures::split7030();
  std::vector<DatasetRecord> dataset{record_from_population(pop, "wet_grass")};
  auto factory = population_sampler_factory(pop);

  EvalConfig config;
  config.method = Method::Sc;
  config.k = 20;
  config.seed = 3;
  auto report = run_eval(dataset, config, factory);

  const auto& r = report.records[0];
  REQUIRE(r.error.empty());
  CHECK(r.k == 20);
  CHECK(r.votes_true + r.votes_false == 20);
  CHECK(r.verdict == Verdict::True);
  CHECK(std::all_of(r.stop_reasons.begin(), r.stop_reasons.end(),
                    [](const std::string& s) { return s == "SamplerFinal"; }));

  SUBCASE("chains are independent: vote shares move with the seed") {
    bool varies = false;
    for (std::uint64_t seed = 0; seed < 6 && !varies; ++seed) {
      EvalConfig other = config;
      other.seed = seed;
      varies = run_eval(dataset, other, factory).records[0].votes_true !=
               r.votes_true;
    }
    CHECK(varies);
  }
}

TEST_CASE("one chain is the same code path as a one-sample vote") {
  auto pop = fixtures::split7030();
  std::vector<DatasetRecord> dataset{record_from_population(pop, "wet_grass")};
  auto factory = population_sampler_factory(pop);

  EvalConfig cot;
  cot.method = Method::Cot;
  cot.seed = 11;
  EvalConfig sc1;
  sc1.method = Method::Sc;
  sc1.k = 1;
  sc1.seed = 11;

  auto a = run_eval(dataset, cot, factory).records[0];
  auto b = run_eval(dataset, sc1, factory).records[0];
  CHECK(a.verdict == b.verdict);
  CHECK(a.ap_hat == b.ap_hat);
  CHECK(a.k == 1);
  CHECK(b.k == 1);
  CHECK(a.votes_true == b.votes_true);
  CHECK(a.path_depths == b.path_depths);
  CHECK(a.sampler_calls == b.sampler_calls);
}

TEST_CASE("method names round-trip") {
  CHECK(method_from_string("pacs") == Method::Pacs);
  CHECK(method_from_string("cot") == Method::Cot);
  CHECK(method_from_string("sc") == Method::Sc);
  CHECK(to_string(Method::Sc) == "sc");
  CHECK_THROWS_AS(method_from_string("beam"), Error);
}
