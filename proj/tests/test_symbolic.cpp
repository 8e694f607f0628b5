#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "qtn/errors.hpp"
#include "qtn/formula.hpp"
#include "qtn/rng.hpp"
#include "qtn/sequence_model.hpp"
#include "qtn/slurp.hpp"
#include "qtn/statistics.hpp"
#include "qtn/symbolic.hpp"

using namespace qtn;
using nlohmann::json;

namespace {

SlurpInstance planted_instance(int n, const std::string& formula) {
  SlurpInstance base = build_instance(n, 3, false);
  dsl::Fingerprint fp =
      dsl::fingerprint(dsl::parse_formula(formula), dsl::InstanceEnvs::of(base));
  REQUIRE_FALSE(fp.invalid);
  return instance_from_values(n, 3, false, fp.values);
}

Candidate fake_candidate(const std::string& text, Distance score,
                         std::array<std::uint64_t, 2> fp = {0, 0}) {
  Candidate c;
  c.text = text;
  c.score = score;
  c.fp = fp;
  return c;
}

}  // namespace

TEST_SUITE("symbolic") {
  TEST_CASE("the preset table is frozen") {
    const auto& table = presets();
    REQUIRE(table.size() == 20);
    std::set<std::string> names;
    for (const auto& cfg : table) names.insert(cfg.name);
    CHECK(names.size() == 20);
    CHECK(names == std::set<std::string>{
                       "d2-balanced-lo", "d2-balanced-hi", "d2-arith-lo", "d2-arith-hi",
                       "d2-cmp-lo",      "d2-cmp-hi",      "d2-logic-lo", "d2-logic-hi",
                       "d3-balanced-lo", "d3-balanced-hi", "d3-arith-lo", "d3-arith-hi",
                       "d3-cmp-lo",      "d3-cmp-hi",      "d3-logic-lo", "d3-logic-hi",
                       "d4-balanced-lo", "d4-balanced-hi", "d4-arith-lo", "d4-arith-hi"});
    CHECK(preset("d3-balanced-lo").max_depth == 3);
    CHECK(preset("d4-arith-hi").max_depth == 4);
    CHECK_THROWS_AS(preset("d9-bogus"), ArgumentError);
  }

  TEST_CASE("the checked-in preset file mirrors the table") {
    std::ifstream in("configs/presets.json");
    REQUIRE_MESSAGE(in.good(), "cannot open configs/presets.json");
    json file = json::parse(in);
    const auto& table = presets();
    REQUIRE(file.is_array());
    REQUIRE(file.size() == table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      const json& row = file[i];
      const GenConfig& cfg = table[i];
      CHECK(row.at("name").get<std::string>() == cfg.name);
      CHECK(row.at("max_depth").get<int>() == cfg.max_depth);
      CHECK(row.at("arith_weight").get<double>() == cfg.arith_weight);
      CHECK(row.at("comparison_weight").get<double>() == cfg.comparison_weight);
      CHECK(row.at("logic_weight").get<double>() == cfg.logic_weight);
      CHECK(row.at("literal_prob").get<double>() == cfg.literal_prob);
      CHECK(row.at("min_len").get<int>() == cfg.min_len);
      CHECK(row.at("max_len").get<int>() == cfg.max_len);
      CHECK(row.at("seed").get<std::uint64_t>() == cfg.seed);
      CHECK(row.size() == 9);
    }
  }

  TEST_CASE("sampling is seeded and always lands inside the wrapper") {
    const GenConfig& cfg = preset("d3-balanced-lo");
    dsl::FormulaAst one = sample_random(cfg, Rng(17));
    dsl::FormulaAst two = sample_random(cfg, Rng(17));
    CHECK(one == two);
    CHECK_FALSE(one == sample_random(cfg, Rng(18)));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      dsl::FormulaAst ast = sample_random(cfg, Rng(seed));
      REQUIRE(ast.kind == dsl::NodeKind::Mod);
      REQUIRE(ast.children.size() == 2);
      CHECK(ast.children[1].kind == dsl::NodeKind::Literal);
      CHECK(ast.children[1].value == 3);
    }
  }

  TEST_CASE("population initialization is exact, distinct, and seeded") {
    const GenConfig& cfg = preset("d2-balanced-lo");
    auto pop = init_population(cfg, 800, Rng(5));
    CHECK(pop.size() == 800);
    std::set<std::string> texts;
    for (const auto& c : pop) {
      texts.insert(c.text);
      CHECK(dsl::parse_formula(c.text) == c.ast);
      CHECK(c.score == Distance::infinite());  // not yet evaluated
    }
    CHECK(texts.size() == pop.size());
    auto again = init_population(cfg, 800, Rng(5));
    for (std::size_t i = 0; i < pop.size(); ++i) CHECK(again[i].text == pop[i].text);
    CHECK_FALSE(init_population(cfg, 800, Rng(6))[0].text == pop[0].text);
  }

  TEST_CASE("a depth-2 generator cannot fill an oversized population") {
    CHECK_THROWS_AS(init_population(preset("d2-balanced-lo"), 6000, Rng(1)), SearchError);
  }

  TEST_CASE("evaluation matches the single-formula scorer at any worker count") {
    SlurpInstance inst = planted_instance(6, "(b+d)%3");
    dsl::InstanceEnvs envs = dsl::InstanceEnvs::of(inst);
    auto pop = init_population(preset("d2-balanced-lo"), 500, Rng(21));
    auto parallel = pop;
    evaluate_population(pop, inst, envs, 1);
    evaluate_population(parallel, inst, envs, 4);
    bool any_finite = false, any_invalid = false;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      CHECK(pop[i].score == parallel[i].score);
      CHECK(pop[i].fp == parallel[i].fp);
      CHECK(pop[i].score == dsl::formula_delta(pop[i].ast, inst, envs));
      any_finite |= !pop[i].score.invalid;
      any_invalid |= pop[i].score.invalid;
    }
    CHECK(any_finite);
    CHECK(any_invalid);  // d2 space still contains division failures like i%0
  }

  TEST_CASE("elite selection sorts by distance, then length, then text") {
    std::vector<Candidate> pop;
    pop.push_back(fake_candidate("aaaaa", Distance{5, false}));
    pop.push_back(fake_candidate("bb", Distance{1, false}));
    pop.push_back(fake_candidate("c", Distance{1, false}));
    pop.push_back(fake_candidate("zz", Distance::infinite()));
    pop.push_back(fake_candidate("ba", Distance{1, false}));
    EliteSplit split = select_elite(pop, 0.6, 1000);
    // ceil(0.6 * 5) = 3 elites; holdout = min(1000, 3/10) = 0.
    CHECK(split.val.empty());
    CHECK(split.train == std::vector<std::size_t>{2, 4, 1});
    EliteSplit full = select_elite(pop, 1.0, 1000);
    REQUIRE(full.val.empty());  // 5/10 rounds down
    CHECK(full.train == std::vector<std::size_t>{2, 4, 1, 0, 3});

    std::vector<Candidate> many;
    for (int i = 0; i < 40; ++i)
      many.push_back(fake_candidate("x" + std::to_string(i),
                                    Distance{static_cast<std::uint64_t>(i), false}));
    EliteSplit wide = select_elite(many, 1.0, 2);
    CHECK(wide.train.size() == 38);
    CHECK(wide.val.size() == 2);  // capped below 40/10
    CHECK(wide.val == std::vector<std::size_t>{38, 39});

    CHECK_THROWS_AS(select_elite({}, 0.5, 10), ArgumentError);
    CHECK_THROWS_AS(select_elite(pop, 0.0, 10), ArgumentError);
    CHECK_THROWS_AS(select_elite(pop, 1.5, 10), ArgumentError);
  }

  TEST_CASE("semantic entropy counts fingerprint classes") {
    std::vector<Candidate> pop;
    for (int i = 0; i < 4; ++i)
      pop.push_back(fake_candidate("t" + std::to_string(i), Distance{0, false}, {7, 7}));
    CHECK(semantic_entropy(pop) == 0.0);
    pop[0].fp = {1, 1};
    pop[1].fp = {1, 1};
    CHECK(semantic_entropy(pop) == 1.0);
    // Invalid candidates pool into a single class of their own.
    pop[2].score = Distance::infinite();
    pop[3].score = Distance::infinite();
    CHECK(semantic_entropy(pop) == 1.0);
    CHECK_THROWS_AS(semantic_entropy({}), ArgumentError);
  }

  TEST_CASE("the n-gram model is a proper seeded distribution") {
    NGramModel model(3, 0.01);
    CHECK(model.order() == 3);
    model.fit({"( b + d ) % 3", "( a + b ) % 3", "a % 3"});
    auto dist = model.next_symbol_distribution("( b");
    CHECK(dist.size() == model.vocabulary().size() + 1);
    double total = 0;
    for (double p : dist) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);

    Rng rng_a(11), rng_b(11);
    CHECK(model.sample(rng_a, 80) == model.sample(rng_b, 80));

    double pp = model.perplexity({"( b + d ) % 3"});
    CHECK(pp >= 1.0);
    CHECK(pp < model.perplexity({"3 % ) d"}));  // garbage reads as less likely

    CHECK_THROWS_AS(NGramModel(1, 0.01), ArgumentError);
    CHECK_THROWS_AS(NGramModel(7, 0.01), ArgumentError);
    CHECK_THROWS_AS(NGramModel(3, 0.0), ArgumentError);
    CHECK_THROWS_AS(model.fit({}), SearchError);
    CHECK(distribution_entropy_bits({0.5, 0.5}) == 1.0);
    CHECK(distribution_entropy_bits({1.0}) == 0.0);
  }

  TEST_CASE("the cross-entropy search finds a planted depth-2 formula") {
    SlurpInstance inst = planted_instance(6, "(b+d)%3");
    SearchConfig cfg;
    cfg.population = 1500;
    cfg.max_iterations = 10;
    cfg.seed = 3;
    cfg.workers = 1;
    SearchReport report = cem_run(inst, preset("d2-balanced-lo"), cfg);
    CHECK(report.success);
    CHECK(report.best_distance == Distance{0, false});
    dsl::Fingerprint got =
        dsl::fingerprint(dsl::parse_formula(report.best_formula), inst);
    dsl::Fingerprint want = dsl::fingerprint(dsl::parse_formula("(b+d)%3"), inst);
    CHECK(got == want);

    SearchReport again = cem_run(inst, preset("d2-balanced-lo"), cfg);
    CHECK(report_to_json(again) == report_to_json(report));
    cfg.workers = 4;
    SearchReport parallel = cem_run(inst, preset("d2-balanced-lo"), cfg);
    CHECK(report_to_json(parallel) == report_to_json(report));
  }

  TEST_CASE("an exhausted budget is reported honestly") {
    SlurpInstance base = build_instance(8, 3, false);
    std::vector<long long> values;
    for (const auto& p : base.decode()) values.push_back(leap(to_nc3(p)));
    values[0] += 1000001;  // out of reach for any small formula pool
    SlurpInstance inst = instance_from_values(8, 3, false, values);

    SearchConfig cfg;
    cfg.population = 200;
    cfg.max_iterations = 2;
    cfg.seed = 9;
    SearchReport report = cem_run(inst, preset("d2-balanced-lo"), cfg);
    CHECK_FALSE(report.success);
    CHECK(report.iterations == 2);
    CHECK(report.best_per_iteration.size() == 2);
    CHECK(report.best_so_far.size() == 2);
    CHECK(report.mean_distance.size() == 2);
    CHECK(report.invalid_fraction.size() == 2);
    CHECK(report.semantic_entropy.size() == 2);
    CHECK(report.mean_length.size() == 2);
    CHECK(report.syntactic_entropy.size() == 1);  // one model fit between iterations
    CHECK(report.val_perplexity.size() == 1);
    CHECK(report.best_so_far[1] <= report.best_so_far[0]);
    CHECK_FALSE(report.best_distance.invalid);
  }

  TEST_CASE("the genetic baseline keeps its incumbent and its wrapper") {
    SlurpInstance inst = planted_instance(6, "(b+d)%3");
    SearchConfig cfg;
    cfg.population = 300;
    cfg.max_iterations = 5;
    cfg.seed = 2;
    SearchReport report = ga_run(inst, preset("d2-balanced-lo"), cfg);
    CHECK(report.method == "ga");
    REQUIRE_FALSE(report.best_so_far.empty());
    for (std::size_t i = 1; i < report.best_so_far.size(); ++i)
      CHECK(report.best_so_far[i] <= report.best_so_far[i - 1]);
    dsl::FormulaAst best = dsl::parse_formula(report.best_formula);
    CHECK(best.kind == dsl::NodeKind::Mod);
    CHECK(best.children[1] == dsl::FormulaAst{dsl::NodeKind::Literal, 0, 3, {}});
    SearchReport again = ga_run(inst, preset("d2-balanced-lo"), cfg);
    CHECK(report_to_json(again) == report_to_json(report));
  }

  TEST_CASE("reports serialize every knob except the worker count") {
    SlurpInstance inst = planted_instance(5, "(b+d)%3");
    SearchConfig cfg;
    cfg.population = 120;
    cfg.max_iterations = 1;
    cfg.seed = 4;
    cfg.workers = 3;
    SearchReport report = cem_run(inst, preset("d2-balanced-lo"), cfg);
    json root = json::parse(report_to_json(report));
    CHECK(root.size() == 8);
    for (const char* key : {"method", "success", "iterations", "best_formula",
                            "best_distance", "generator", "config", "trace"})
      CHECK(root.contains(key));
    CHECK(root["method"] == "cem");
    CHECK(root["generator"].size() == 9);
    CHECK(root["generator"]["name"] == "d2-balanced-lo");
    CHECK(root["config"].size() == 13);
    CHECK_FALSE(root["config"].contains("workers"));
    CHECK(root["config"]["corpus_notation"] == "infix_spaced");
    CHECK(root["trace"].size() == 8);
    CHECK(root["trace"]["best"].size() == root["trace"]["best_so_far"].size());
    // Invalid distances travel as null.
    std::vector<Candidate> one{fake_candidate("x", Distance::infinite())};
    SearchReport tiny;
    tiny.method = "cem";
    tiny.best_distance = Distance::infinite();
    json packed = json::parse(report_to_json(tiny));
    CHECK(packed["best_distance"].is_null());
  }
}
