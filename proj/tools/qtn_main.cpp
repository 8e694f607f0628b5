#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qtn/errors.hpp"
#include "qtn/formula.hpp"
#include "qtn/functional.hpp"
#include "qtn/narayana.hpp"
#include "qtn/nc_partition.hpp"
#include "qtn/polyomino.hpp"
#include "qtn/slurp.hpp"
#include "qtn/statistics.hpp"
#include "qtn/symbolic.hpp"

namespace {

using nlohmann::json;
using namespace qtn;

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw Error("cannot open " + out_path);
  file << text;
  if (!file) throw Error("write failed: " + out_path);
}

void emit_json(json root, const json& command, const std::string& out_path) {
  root["command"] = command;
  write_text(root.dump(2) + "\n", out_path);
}

// Text and CSV outputs keep their pinned shapes, so the resolved
// configuration is echoed on stderr instead.
void echo_config(const json& command) { std::cerr << command.dump() << "\n"; }

int default_workers() {
  if (const char* env = std::getenv("QTN_WORKERS")) {
    int value = std::atoi(env);
    if (value >= 1) return value;
  }
  return 1;
}

json polynomial_json(const QTPolynomial& poly) {
  json terms = json::array();
  for (const auto& [key, coeff] : poly.terms())
    terms.push_back({{"q", key.first}, {"t", key.second}, {"coeff", coeff}});
  return {{"text", poly.text()}, {"terms", terms}};
}

struct EnumerateArgs {
  int n = 0, k = 0;
  std::string objects = "nc", out;
};

int cmd_enumerate(const EnumerateArgs& args) {
  echo_config({{"command", "enumerate"},
               {"n", args.n},
               {"k", args.k},
               {"objects", args.objects},
               {"out", args.out}});
  std::string text;
  std::size_t count = 0;
  if (args.objects == "nc") {
    auto all = enumerate_nc(args.n, args.k);
    count = all.size();
    for (const auto& p : all) text += serialize_nc(p) + "\n";
  } else {
    auto all = enumerate_pp(args.n, args.k);
    count = all.size();
    for (const auto& p : all) text += serialize_pp(p) + "\n";
  }
  write_text(text, args.out);
  std::cerr << count << " objects\n";
  return 0;
}

struct StatArgs {
  std::string stat, out;
  int n = 0, k = 0;
};

int cmd_stat(const StatArgs& args) {
  echo_config({{"command", "stat"},
               {"stat", args.stat},
               {"n", args.n},
               {"k", args.k},
               {"out", args.out}});
  const Statistic& stat = get_statistic(args.stat);
  std::string text = "partition,value\n";
  for (const auto& p : enumerate_nc(args.n, args.k))
    text += serialize_nc(p) + ',' + std::to_string(stat.fn(p, args.k)) + '\n';
  write_text(text, args.out);
  return 0;
}

struct NarayanaArgs {
  int n = 0, k = 0;
  bool incr = false;
};

int cmd_narayana(const NarayanaArgs& args) {
  echo_config({{"command", "narayana"}, {"n", args.n}, {"k", args.k},
               {"incremental", args.incr}});
  QTPolynomial poly = args.incr ? incremental(args.n, args.k) : qt_narayana(args.n, args.k);
  std::cout << poly.text() << "\n";
  return 0;
}

struct VerifyArgs {
  std::string s1, s2, out;
  int n = 0, k = 0;
};

int cmd_verify(const VerifyArgs& args) {
  PairingReport report =
      verify_pairing(get_statistic(args.s1), get_statistic(args.s2), args.n, args.k);
  json root;
  root["match"] = report.match;
  root["observed"] = polynomial_json(report.observed);
  root["expected"] = polynomial_json(report.expected);
  if (report.first_discrepancy) {
    const auto& term = *report.first_discrepancy;
    root["first_discrepancy"] = {{"q", term.q},
                                 {"t", term.t},
                                 {"observed", term.observed},
                                 {"expected", term.expected}};
  } else {
    root["first_discrepancy"] = nullptr;
  }
  emit_json(root,
            {{"command", "verify"}, {"s1", args.s1}, {"s2", args.s2},
             {"n", args.n}, {"k", args.k}},
            args.out);
  if (report.match) {
    std::cerr << "(" << args.s1 << ", " << args.s2 << ") matches on NC(" << args.n << ", "
              << args.k << ")\n";
    return 0;
  }
  const auto& term = *report.first_discrepancy;
  std::cerr << "mismatch at q^" << term.q << " t^" << term.t << ": observed "
            << term.observed << ", expected " << term.expected << "\n";
  return 1;
}

struct GenDatasetArgs {
  int n = 0, k = 0;
  bool refined = false;
  std::string out, csv;
};

int cmd_gen_dataset(const GenDatasetArgs& args) {
  SlurpInstance inst = build_instance(args.n, args.k, args.refined);
  if (args.out.empty())
    write_text(instance_to_json(inst), "");
  else
    write_instance(inst, args.out);
  if (!args.csv.empty()) {
    echo_config({{"command", "gen-dataset"}, {"n", args.n}, {"k", args.k},
                 {"refined", args.refined}, {"csv", args.csv}});
    write_text(instance_to_csv(inst), args.csv);
  }
  std::cerr << inst.size() << " objects, " << inst.bags.size() << " bags\n";
  return 0;
}

struct EvalFormulaArgs {
  std::string formula, file, instance, notation = "infix", out;
};

int cmd_eval_formula(const EvalFormulaArgs& args) {
  auto notation = dsl::notation_from_name(args.notation);
  if (!notation) throw ArgumentError("unknown notation: " + args.notation);
  std::vector<std::pair<std::string, dsl::Notation>> sources;
  if (!args.formula.empty()) sources.emplace_back(args.formula, *notation);
  if (!args.file.empty()) {
    dsl::FormulaFile file = dsl::read_formula_file(args.file);
    for (const auto& line : file.lines) sources.emplace_back(line, file.notation);
  }
  if (sources.empty()) throw ArgumentError("need --formula or --file");

  SlurpInstance inst = read_instance(args.instance);
  dsl::InstanceEnvs envs = dsl::InstanceEnvs::of(inst);
  json results = json::array();
  bool all_zero = true;
  for (const auto& [text, source_notation] : sources) {
    dsl::FormulaAst ast = dsl::parse_formula(text, source_notation);
    Distance distance = dsl::formula_delta(ast, inst, envs);
    json row;
    row["formula"] = dsl::print(ast, dsl::Notation::Infix);
    row["delta"] = distance.invalid ? json(nullptr) : json(distance.value);
    row["invalid"] = distance.invalid;
    results.push_back(row);
    if (distance.invalid) {
      all_zero = false;
      std::cerr << "delta=invalid\n";
    } else {
      all_zero = all_zero && distance.value == 0;
      std::cerr << "delta=" << distance.value << "\n";
    }
  }
  emit_json({{"results", results}},
            {{"command", "eval-formula"}, {"instance", args.instance},
             {"notation", args.notation}},
            args.out);
  return all_zero ? 0 : 1;
}

struct SearchArgs {
  std::string method = "cem", instance, preset_name = "d3-balanced-lo", out;
  SearchConfig cfg;
};

int cmd_search(const SearchArgs& args) {
  SlurpInstance inst = read_instance(args.instance);
  const GenConfig& gen = preset(args.preset_name);
  SearchReport report;
  if (args.method == "cem")
    report = cem_run(inst, gen, args.cfg);
  else if (args.method == "ga")
    report = ga_run(inst, gen, args.cfg);
  else
    throw ArgumentError("unknown method: " + args.method);
  json root = json::parse(report_to_json(report));
  emit_json(root,
            {{"command", "search"}, {"method", args.method},
             {"instance", args.instance}, {"preset", args.preset_name}},
            args.out);
  std::cerr << args.method << ": " << (report.success ? "solved" : "budget exhausted")
            << " after " << report.iterations << " iterations, best ";
  if (report.best_distance.invalid)
    std::cerr << "invalid\n";
  else
    std::cerr << "delta=" << report.best_distance.value << " " << report.best_formula << "\n";
  return 0;
}

struct SelfTrainArgs {
  std::string instance, scorer = "baseline", out;
  SelfTrainConfig cfg;
  int h = 0;
};

int cmd_selftrain(const SelfTrainArgs& args) {
  SlurpInstance inst = read_instance(args.instance);
  SelfTrainConfig cfg = args.cfg;
  if (args.h != 0) cfg.h = args.h;
  std::unique_ptr<Scorer> scorer;
  if (args.scorer == "baseline") {
    scorer = std::make_unique<LinearScorer>(inst);
  } else if (args.scorer.rfind("oracle:", 0) == 0) {
    scorer = std::make_unique<OracleScorer>(inst, get_statistic(args.scorer.substr(7)));
  } else {
    throw ArgumentError("unknown scorer: " + args.scorer);
  }
  RunResult result = self_train(inst, *scorer, cfg);
  json root = json::parse(run_result_to_json(result, inst, cfg));
  emit_json(root,
            {{"command", "selftrain"}, {"instance", args.instance}, {"scorer", args.scorer}},
            args.out);
  if (result.success)
    std::cerr << "fixed point after " << result.iterations << " iterations\n";
  else
    std::cerr << "no fixed point within " << result.iterations << " iterations\n";
  return 0;
}

struct BijectionArgs {
  int n = 0;
  bool check = false;
  std::string out;
};

int cmd_bijection(const BijectionArgs& args) {
  echo_config({{"command", "bijection"}, {"n", args.n}, {"check", args.check},
               {"out", args.out}});
  auto all = enumerate_nc(args.n, 3);
  std::string table = "partition,skip,leap,image\n";
  bool ok = true;
  for (const auto& p : all) {
    NC3 e = to_nc3(p);
    NC3 image = exchange_skip_leap(e);
    NCPartition q = from_nc3(image);
    table += serialize_nc(p) + ',' + std::to_string(skip(p)) + ',' +
             std::to_string(leap(e)) + ',' + serialize_nc(q) + '\n';
    if (args.check) {
      bool involutive = from_nc3(exchange_skip_leap(image)) == p;
      bool exchanged = skip(q) == leap(e) && leap(image) == skip(p);
      if (!involutive || !exchanged) {
        ok = false;
        std::cerr << "failure at " << serialize_nc(p) << "\n";
      }
    }
  }
  write_text(table, args.out);
  if (args.check)
    std::cerr << (ok ? "involution and exchange verified on " : "FAILED on ")
              << all.size() << " partitions\n";
  return ok ? 0 : 1;
}

int cmd_presets() {
  json root = json::array();
  for (const auto& gen : presets())
    root.push_back({{"name", gen.name},
                    {"max_depth", gen.max_depth},
                    {"arith_weight", gen.arith_weight},
                    {"comparison_weight", gen.comparison_weight},
                    {"logic_weight", gen.logic_weight},
                    {"literal_prob", gen.literal_prob},
                    {"min_len", gen.min_len},
                    {"max_len", gen.max_len},
                    {"seed", gen.seed}});
  emit_json({{"presets", root}}, {{"command", "presets"}}, "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q,t-Narayana combinatorics toolkit"};
  app.require_subcommand(1);

  EnumerateArgs enumerate_args;
  auto* enumerate_cmd =
      app.add_subcommand("enumerate", "List noncrossing partitions or polyominoes");
  enumerate_cmd->add_option("n", enumerate_args.n, "Ground set size (nc) or width (pp)")
      ->required();
  enumerate_cmd->add_option("k", enumerate_args.k, "Rank (nc) or height (pp)")->required();
  enumerate_cmd->add_option("--objects", enumerate_args.objects, "nc or pp")
      ->check(CLI::IsMember({"nc", "pp"}));
  enumerate_cmd->add_option("--out", enumerate_args.out, "Output path (default stdout)");

  StatArgs stat_args;
  auto* stat_cmd = app.add_subcommand("stat", "Tabulate a statistic over NC(n,k) as CSV");
  stat_cmd->add_option("--stat", stat_args.stat, "Statistic name")->required();
  stat_cmd->add_option("--n", stat_args.n)->required();
  stat_cmd->add_option("--k", stat_args.k)->required();
  stat_cmd->add_option("--out", stat_args.out, "Output path (default stdout)");

  NarayanaArgs narayana_args;
  auto* narayana_cmd = app.add_subcommand("narayana", "Print the q,t-Narayana polynomial");
  narayana_cmd->add_option("n", narayana_args.n)->required();
  narayana_cmd->add_option("k", narayana_args.k)->required();
  narayana_cmd->add_flag("--incremental", narayana_args.incr,
                         "Print the difference against n-1 instead");

  VerifyArgs verify_args;
  auto* verify_cmd =
      app.add_subcommand("verify", "Compare a joint statistic pair against the polynomial");
  verify_cmd->add_option("s1", verify_args.s1, "First statistic")->required();
  verify_cmd->add_option("s2", verify_args.s2, "Second statistic")->required();
  verify_cmd->add_option("n", verify_args.n)->required();
  verify_cmd->add_option("k", verify_args.k)->required();
  verify_cmd->add_option("--out", verify_args.out, "Report path (default stdout)");

  GenDatasetArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen-dataset", "Build a weak-supervision instance");
  gen_cmd->add_option("n", gen_args.n)->required();
  gen_cmd->add_option("k", gen_args.k)->required();
  gen_cmd->add_flag("--refined", gen_args.refined, "Split bags by the truncation level");
  gen_cmd->add_option("--out", gen_args.out, "Instance JSON path (default stdout)");
  gen_cmd->add_option("--csv", gen_args.csv, "Also write a plot-ready membership CSV");

  EvalFormulaArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval-formula", "Score formulas against an instance");
  eval_cmd->add_option("--formula", eval_args.formula, "Formula text");
  eval_cmd->add_option("--file", eval_args.file, "Formula file with a notation header");
  eval_cmd->add_option("--instance", eval_args.instance, "Instance JSON path")->required();
  eval_cmd->add_option("--notation", eval_args.notation, "Notation for --formula")
      ->check(CLI::IsMember({"infix", "infix_spaced", "rpn"}));
  eval_cmd->add_option("--out", eval_args.out, "Report path (default stdout)");

  SearchArgs search_args;
  search_args.cfg.workers = default_workers();
  auto* search_cmd = app.add_subcommand("search", "Run a formula search");
  search_cmd->add_option("--method", search_args.method, "cem or ga")
      ->check(CLI::IsMember({"cem", "ga"}));
  search_cmd->add_option("--instance", search_args.instance, "Instance JSON path")
      ->required();
  search_cmd->add_option("--preset", search_args.preset_name, "Generation preset name");
  search_cmd->add_option("--seed", search_args.cfg.seed);
  search_cmd->add_option("--budget", search_args.cfg.max_iterations, "Iteration budget");
  search_cmd->add_option("--population", search_args.cfg.population);
  search_cmd->add_option("--elite-frac", search_args.cfg.elite_frac);
  search_cmd->add_option("--workers", search_args.cfg.workers,
                         "Evaluation threads (default $QTN_WORKERS or 1)");
  search_cmd->add_option("--out", search_args.out, "Report path (default stdout)");

  SelfTrainArgs selftrain_args;
  auto* selftrain_cmd =
      app.add_subcommand("selftrain", "Alternate scoring and constraint projection");
  selftrain_cmd->add_option("--instance", selftrain_args.instance, "Instance JSON path")
      ->required();
  selftrain_cmd->add_option("--scorer", selftrain_args.scorer, "baseline or oracle:STAT");
  selftrain_cmd->add_option("--val-frac", selftrain_args.cfg.val_frac);
  selftrain_cmd->set_help_flag("--help", "Print help");
  selftrain_cmd->add_option("--h", selftrain_args.h, "Homogeneity degree (1 or 2)");
  selftrain_cmd->add_option("--seed", selftrain_args.cfg.seed);
  selftrain_cmd->add_option("--max-iters", selftrain_args.cfg.max_iters);
  selftrain_cmd->add_option("--out", selftrain_args.out, "Report path (default stdout)");

  BijectionArgs bijection_args;
  auto* bijection_cmd =
      app.add_subcommand("bijection", "Print the skip/leap exchange witness table");
  bijection_cmd->add_option("--n", bijection_args.n, "Ground set size, k fixed at 3")
      ->required();
  bijection_cmd->add_flag("--check", bijection_args.check,
                          "Verify the involution and exchange pointwise");
  bijection_cmd->add_option("--out", bijection_args.out, "Table path (default stdout)");

  auto* presets_cmd = app.add_subcommand("presets", "List the generation presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (enumerate_cmd->parsed()) return cmd_enumerate(enumerate_args);
    if (stat_cmd->parsed()) return cmd_stat(stat_args);
    if (narayana_cmd->parsed()) return cmd_narayana(narayana_args);
    if (verify_cmd->parsed()) return cmd_verify(verify_args);
    if (gen_cmd->parsed()) return cmd_gen_dataset(gen_args);
    if (eval_cmd->parsed()) return cmd_eval_formula(eval_args);
    if (search_cmd->parsed()) return cmd_search(search_args);
    if (selftrain_cmd->parsed()) return cmd_selftrain(selftrain_args);
    if (bijection_cmd->parsed()) return cmd_bijection(bijection_args);
    if (presets_cmd->parsed()) return cmd_presets();
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SearchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InternalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
