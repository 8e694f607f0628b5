#include "qtn/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "qtn/errors.hpp"
#include "qtn/parallel.hpp"

namespace qtn {

using nlohmann::json;

const std::vector<GenConfig>& presets() {
  static const std::vector<GenConfig> table = [] {
    std::vector<GenConfig> out;
    struct Profile {
      const char* name;
      double arith, cmp, logic;
    };
    const Profile profiles[] = {
        {"balanced", 1, 1, 1}, {"arith", 4, 1, 1}, {"cmp", 1, 4, 1}, {"logic", 1, 1, 4}};
    for (int depth : {2, 3, 4}) {
      for (const Profile& profile : profiles) {
        for (double lit : {0.25, 0.5}) {
          if (out.size() == 20) return out;
          GenConfig cfg;
          cfg.name = "d" + std::to_string(depth) + "-" + profile.name + "-" +
                     (lit < 0.3 ? "lo" : "hi");
          cfg.max_depth = depth;
          cfg.arith_weight = profile.arith;
          cfg.comparison_weight = profile.cmp;
          cfg.logic_weight = profile.logic;
          cfg.literal_prob = lit;
          out.push_back(std::move(cfg));
        }
      }
    }
    return out;
  }();
  return table;
}

const GenConfig& preset(std::string_view name) {
  for (const GenConfig& cfg : presets())
    if (cfg.name == name) return cfg;
  throw ArgumentError("unknown preset: " + std::string(name));
}

namespace {

dsl::FormulaAst leaf_var(char var) {
  dsl::FormulaAst node;
  node.kind = dsl::NodeKind::Var;
  node.var = var;
  return node;
}

dsl::FormulaAst leaf_literal(long long value) {
  dsl::FormulaAst node;
  node.kind = dsl::NodeKind::Literal;
  node.value = value;
  return node;
}

dsl::FormulaAst random_leaf(const GenConfig& cfg, Rng& rng) {
  if (rng.next_double() < cfg.literal_prob) {
    if (rng.next_double() < 0.25)
      return leaf_literal(static_cast<long long>(1 + rng.below(3)) * 10 +
                          static_cast<long long>(rng.below(4)));
    return leaf_literal(static_cast<long long>(rng.below(4)));
  }
  static constexpr char vars[5] = {'a', 'b', 'c', 'd', 'i'};
  return leaf_var(vars[rng.below(5)]);
}

dsl::NodeKind random_operator(const GenConfig& cfg, Rng& rng) {
  static constexpr dsl::NodeKind arith[] = {dsl::NodeKind::Add, dsl::NodeKind::Sub,
                                            dsl::NodeKind::Mod};
  static constexpr dsl::NodeKind cmp[] = {dsl::NodeKind::Lt, dsl::NodeKind::Gt,
                                          dsl::NodeKind::Eq};
  static constexpr dsl::NodeKind logic[] = {dsl::NodeKind::And, dsl::NodeKind::Or,
                                            dsl::NodeKind::Not};
  double total = cfg.arith_weight + cfg.comparison_weight + cfg.logic_weight;
  double u = rng.next_double() * total;
  if (u < cfg.arith_weight) return arith[rng.below(3)];
  if (u < cfg.arith_weight + cfg.comparison_weight) return cmp[rng.below(3)];
  return logic[rng.below(3)];
}

dsl::FormulaAst random_expr(const GenConfig& cfg, int depth, Rng& rng) {
  if (depth <= 1 || rng.next_double() < 0.25) return random_leaf(cfg, rng);
  dsl::FormulaAst node;
  node.kind = random_operator(cfg, rng);
  node.children.push_back(random_expr(cfg, depth - 1, rng));
  if (node.kind != dsl::NodeKind::Not)
    node.children.push_back(random_expr(cfg, depth - 1, rng));
  return node;
}

dsl::FormulaAst wrap_mod3(dsl::FormulaAst expr) {
  dsl::FormulaAst root;
  root.kind = dsl::NodeKind::Mod;
  root.children.push_back(std::move(expr));
  root.children.push_back(leaf_literal(3));
  return root;
}

void check_gen_config(const GenConfig& cfg) {
  if (cfg.max_depth < 1) throw ArgumentError("max_depth must be at least 1");
  if (cfg.min_len > cfg.max_len) throw ArgumentError("min_len exceeds max_len");
  if (cfg.arith_weight < 0 || cfg.comparison_weight < 0 || cfg.logic_weight < 0 ||
      cfg.arith_weight + cfg.comparison_weight + cfg.logic_weight <= 0)
    throw ArgumentError("operator weights must be nonnegative and not all zero");
  if (cfg.literal_prob < 0 || cfg.literal_prob > 1)
    throw ArgumentError("literal probability must be in [0, 1]");
}

}  // namespace

dsl::FormulaAst sample_random(const GenConfig& cfg, Rng rng) {
  check_gen_config(cfg);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    dsl::FormulaAst root = wrap_mod3(random_expr(cfg, cfg.max_depth, rng));
    std::size_t len = dsl::codepoint_length(dsl::print(root, dsl::Notation::Infix));
    if (len >= static_cast<std::size_t>(cfg.min_len) &&
        len <= static_cast<std::size_t>(cfg.max_len))
      return root;
  }
  throw SearchError("no length-conforming formula after 1000 draws under " + cfg.name);
}

std::vector<Candidate> init_population(const GenConfig& cfg, std::size_t size, Rng rng) {
  if (size == 0) throw ArgumentError("population size must be positive");
  std::vector<Candidate> pop;
  pop.reserve(size);
  std::unordered_set<std::string> seen;
  std::size_t limit = 100 * size;
  for (std::size_t attempt = 0; attempt < limit && pop.size() < size; ++attempt) {
    dsl::FormulaAst ast = sample_random(cfg, rng.derive(attempt));
    std::string text = dsl::print(ast, dsl::Notation::Infix);
    if (!seen.insert(text).second) continue;
    Candidate c;
    c.text = std::move(text);
    c.ast = std::move(ast);
    pop.push_back(std::move(c));
  }
  if (pop.size() < size)
    throw SearchError("could not draw " + std::to_string(size) + " unique formulas under " +
                      cfg.name);
  return pop;
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::array<std::uint64_t, 2> hash_values(const std::vector<long long>& values) {
  std::array<std::uint64_t, 2> h = {0x243f6a8885a308d3ull, 0x13198a2e03707344ull};
  for (long long v : values) {
    h[0] = mix64(h[0] ^ static_cast<std::uint64_t>(v));
    h[1] = mix64(h[1] ^ static_cast<std::uint64_t>(v) ^ 0xa4093822299f31d0ull);
  }
  return h;
}

}  // namespace

void evaluate_population(std::vector<Candidate>& pop, const SlurpInstance& inst,
                         const dsl::InstanceEnvs& envs, int workers) {
  parallel_for(pop.size(), workers, [&](std::size_t idx) {
    Candidate& c = pop[idx];
    dsl::Fingerprint fp = dsl::fingerprint(c.ast, envs);
    if (fp.invalid) {
      c.score = Distance::infinite();
      c.fp = {0, 0};
    } else {
      c.score = Distance{delta(fp.values, inst), false};
      c.fp = hash_values(fp.values);
    }
  });
}

namespace {

bool candidate_better(const Candidate& x, std::size_t len_x, const Candidate& y,
                      std::size_t len_y) {
  if (x.score != y.score) return x.score < y.score;
  if (len_x != len_y) return len_x < len_y;
  return x.text < y.text;
}

std::vector<std::size_t> text_lengths(const std::vector<Candidate>& pop) {
  std::vector<std::size_t> lengths(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i)
    lengths[i] = dsl::codepoint_length(pop[i].text);
  return lengths;
}

}  // namespace

EliteSplit select_elite(const std::vector<Candidate>& pop, double elite_frac,
                        std::size_t holdout_cap) {
  if (pop.empty()) throw ArgumentError("elite selection needs a population");
  if (elite_frac <= 0 || elite_frac > 1) throw ArgumentError("elite fraction must be in (0, 1]");
  auto lengths = text_lengths(pop);
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return candidate_better(pop[x], lengths[x], pop[y], lengths[y]);
  });
  auto elite_count = static_cast<std::size_t>(
      std::ceil(elite_frac * static_cast<double>(pop.size())));
  elite_count = std::min(elite_count, pop.size());
  std::size_t holdout = std::min(holdout_cap, elite_count / 10);
  EliteSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<long>(elite_count - holdout));
  split.val.assign(order.begin() + static_cast<long>(elite_count - holdout),
                   order.begin() + static_cast<long>(elite_count));
  return split;
}

double semantic_entropy(const std::vector<Candidate>& pop) {
  if (pop.empty()) throw ArgumentError("semantic entropy of an empty population");
  std::map<std::array<std::uint64_t, 2>, std::size_t> classes;
  std::size_t invalid = 0;
  for (const Candidate& c : pop) {
    if (c.score.invalid) ++invalid;
    else ++classes[c.fp];
  }
  double n = static_cast<double>(pop.size());
  double bits = 0;
  auto account = [&](std::size_t count) {
    if (count == 0) return;
    double p = static_cast<double>(count) / n;
    bits -= p * std::log2(p);
  };
  for (const auto& [fp, count] : classes) account(count);
  account(invalid);
  return bits;
}

double syntactic_entropy(const SequenceModel& model, std::size_t sample_count, Rng rng,
                         std::size_t max_len) {
  if (sample_count == 0) throw ArgumentError("sample_count must be positive");
  const auto& vocab = model.vocabulary();
  double total_bits = 0;
  std::size_t positions = 0;
  for (std::size_t s = 0; s < sample_count; ++s) {
    Rng stream = rng.derive(s);
    std::string prefix;
    for (std::size_t step = 0; step < max_len; ++step) {
      auto dist = model.next_symbol_distribution(prefix);
      total_bits += distribution_entropy_bits(dist);
      ++positions;
      double u = stream.next_double();
      std::size_t pick = dist.size() - 1;
      double acc = 0;
      for (std::size_t j = 0; j < dist.size(); ++j) {
        acc += dist[j];
        if (u < acc) {
          pick = j;
          break;
        }
      }
      if (pick == dist.size() - 1) break;
      prefix += vocab[pick];
    }
  }
  return total_bits / static_cast<double>(positions);
}

namespace {

json distance_json(const Distance& d) {
  if (d.invalid) return nullptr;
  return d.value;
}

json double_json(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

template <class T, class Fn>
json array_json(const std::vector<T>& values, Fn&& fn) {
  json out = json::array();
  for (const T& v : values) out.push_back(fn(v));
  return out;
}

struct IterationStats {
  std::size_t best_index = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double invalid_fraction = 0;
  double mean_length = 0;
};

IterationStats population_stats(const std::vector<Candidate>& pop,
                                const std::vector<std::size_t>& lengths) {
  IterationStats stats;
  double sum = 0;
  std::size_t valid = 0, invalid = 0, length_sum = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (candidate_better(pop[i], lengths[i], pop[stats.best_index], lengths[stats.best_index]))
      stats.best_index = i;
    if (pop[i].score.invalid) ++invalid;
    else {
      sum += static_cast<double>(pop[i].score.value);
      ++valid;
    }
    length_sum += lengths[i];
  }
  if (valid > 0) stats.mean = sum / static_cast<double>(valid);
  stats.invalid_fraction = static_cast<double>(invalid) / static_cast<double>(pop.size());
  stats.mean_length = static_cast<double>(length_sum) / static_cast<double>(pop.size());
  return stats;
}

void check_search_config(const SearchConfig& cfg) {
  if (cfg.population == 0) throw ArgumentError("population must be positive");
  if (cfg.max_iterations < 1) throw ArgumentError("budget must allow at least one iteration");
  if (cfg.tournament_size < 1) throw ArgumentError("tournament size must be positive");
  if (cfg.crossover_prob < 0 || cfg.mutation_prob < 0 ||
      cfg.crossover_prob + cfg.mutation_prob > 1)
    throw ArgumentError("crossover and mutation probabilities must fit in [0, 1]");
}

// Updates the incumbent, appends per-iteration trace entries, and reports
// whether the incumbent has reached distance zero.
bool record_iteration(SearchReport& report, const std::vector<Candidate>& pop,
                      const std::vector<std::size_t>& lengths,
                      std::optional<Candidate>& incumbent, std::optional<std::size_t>& inc_len) {
  IterationStats stats = population_stats(pop, lengths);
  const Candidate& best = pop[stats.best_index];
  if (!incumbent ||
      candidate_better(best, lengths[stats.best_index], *incumbent, *inc_len)) {
    incumbent = best;
    inc_len = lengths[stats.best_index];
  }
  report.best_per_iteration.push_back(best.score);
  report.best_so_far.push_back(incumbent->score);
  report.mean_distance.push_back(stats.mean);
  report.invalid_fraction.push_back(stats.invalid_fraction);
  report.semantic_entropy.push_back(semantic_entropy(pop));
  report.mean_length.push_back(stats.mean_length);
  return !incumbent->score.invalid && incumbent->score.value == 0;
}

void verify_winner(const Candidate& incumbent, const SlurpInstance& inst,
                   const dsl::InstanceEnvs& envs) {
  dsl::FormulaAst reparsed = dsl::parse_formula(incumbent.text, dsl::Notation::Infix);
  Distance check = dsl::formula_delta(reparsed, inst, envs);
  if (check.invalid || check.value != 0)
    throw InternalError("zero-distance candidate failed re-verification");
}

void finalize_report(SearchReport& report, const std::optional<Candidate>& incumbent) {
  if (incumbent) {
    report.best_formula = incumbent->text;
    report.best_distance = incumbent->score;
  }
}

}  // namespace

std::string report_to_json(const SearchReport& r) {
  json root;
  root["method"] = r.method;
  root["success"] = r.success;
  root["iterations"] = r.iterations;
  root["best_formula"] = r.best_formula;
  root["best_distance"] = distance_json(r.best_distance);

  json gen;
  gen["name"] = r.gen.name;
  gen["max_depth"] = r.gen.max_depth;
  gen["arith_weight"] = r.gen.arith_weight;
  gen["comparison_weight"] = r.gen.comparison_weight;
  gen["logic_weight"] = r.gen.logic_weight;
  gen["literal_prob"] = r.gen.literal_prob;
  gen["min_len"] = r.gen.min_len;
  gen["max_len"] = r.gen.max_len;
  gen["seed"] = r.gen.seed;
  root["generator"] = gen;

  json cfg;
  cfg["population"] = r.config.population;
  cfg["elite_frac"] = r.config.elite_frac;
  cfg["holdout_cap"] = r.config.holdout_cap;
  cfg["max_iterations"] = r.config.max_iterations;
  cfg["seed"] = r.config.seed;
  cfg["corpus_notation"] = dsl::notation_name(r.config.corpus_notation);
  cfg["ngram_order"] = r.config.ngram_order;
  cfg["ngram_lambda"] = r.config.ngram_lambda;
  cfg["entropy_samples"] = r.config.entropy_samples;
  cfg["tournament_size"] = r.config.tournament_size;
  cfg["crossover_prob"] = r.config.crossover_prob;
  cfg["mutation_prob"] = r.config.mutation_prob;
  cfg["length_cap"] = r.config.length_cap;
  root["config"] = cfg;

  json trace;
  trace["best"] = array_json(r.best_per_iteration, distance_json);
  trace["best_so_far"] = array_json(r.best_so_far, distance_json);
  trace["mean_distance"] = array_json(r.mean_distance, double_json);
  trace["invalid_fraction"] = array_json(r.invalid_fraction, double_json);
  trace["semantic_entropy"] = array_json(r.semantic_entropy, double_json);
  trace["syntactic_entropy"] = array_json(r.syntactic_entropy, double_json);
  trace["val_perplexity"] = array_json(r.val_perplexity, double_json);
  trace["mean_length"] = array_json(r.mean_length, double_json);
  root["trace"] = trace;

  return root.dump(2) + "\n";
}

SearchReport cem_run(const SlurpInstance& inst, const GenConfig& gen, const SearchConfig& cfg,
                     const ModelFactory& model_factory) {
  check_gen_config(gen);
  check_search_config(cfg);
  ModelFactory factory = model_factory;
  if (!factory)
    factory = [order = cfg.ngram_order, lambda = cfg.ngram_lambda] {
      return std::make_unique<NGramModel>(order, lambda);
    };

  dsl::InstanceEnvs envs = dsl::InstanceEnvs::of(inst);
  Rng root(cfg.seed);
  SearchReport report;
  report.method = "cem";
  report.gen = gen;
  report.config = cfg;

  std::vector<Candidate> pop = init_population(gen, cfg.population, root.derive(0));
  std::optional<Candidate> incumbent;
  std::optional<std::size_t> incumbent_len;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    evaluate_population(pop, inst, envs, cfg.workers);
    report.iterations = iter;
    auto lengths = text_lengths(pop);
    if (record_iteration(report, pop, lengths, incumbent, incumbent_len)) {
      verify_winner(*incumbent, inst, envs);
      report.success = true;
      break;
    }
    if (iter == cfg.max_iterations) break;

    EliteSplit elite = select_elite(pop, cfg.elite_frac, cfg.holdout_cap);
    std::vector<std::string> train_corpus, val_corpus;
    train_corpus.reserve(elite.train.size());
    for (std::size_t ix : elite.train)
      train_corpus.push_back(dsl::print(pop[ix].ast, cfg.corpus_notation));
    for (std::size_t ix : elite.val)
      val_corpus.push_back(dsl::print(pop[ix].ast, cfg.corpus_notation));

    auto model = factory();
    model->fit(train_corpus);
    report.syntactic_entropy.push_back(
        syntactic_entropy(*model, cfg.entropy_samples, root.derive(iter, 0, 1), cfg.length_cap));
    report.val_perplexity.push_back(
        val_corpus.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : model->perplexity(val_corpus));

    std::vector<Candidate> next;
    next.reserve(cfg.population);
    std::unordered_set<std::string> seen;
    Candidate carried;
    carried.text = incumbent->text;
    carried.ast = incumbent->ast;
    seen.insert(carried.text);
    next.push_back(std::move(carried));
    for (std::size_t slot = 1; slot < cfg.population; ++slot) {
      bool filled = false;
      for (int retry = 0; retry < 20 && !filled; ++retry) {
        Rng draw = root.derive(static_cast<std::uint64_t>(iter) + 1, slot,
                               static_cast<std::uint64_t>(retry));
        std::string text = model->sample(draw, cfg.length_cap);
        dsl::FormulaAst ast;
        try {
          ast = dsl::parse_formula(text, cfg.corpus_notation);
        } catch (const ParseError&) {
          continue;
        }
        std::string canonical = dsl::print(ast, dsl::Notation::Infix);
        if (!seen.insert(canonical).second) continue;
        Candidate c;
        c.text = std::move(canonical);
        c.ast = std::move(ast);
        next.push_back(std::move(c));
        filled = true;
      }
      for (int retry = 0; retry < 100 && !filled; ++retry) {
        dsl::FormulaAst ast = sample_random(
            gen, root.derive(static_cast<std::uint64_t>(iter) + 1, slot,
                             1000 + static_cast<std::uint64_t>(retry)));
        std::string canonical = dsl::print(ast, dsl::Notation::Infix);
        if (!seen.insert(canonical).second) continue;
        Candidate c;
        c.text = std::move(canonical);
        c.ast = std::move(ast);
        next.push_back(std::move(c));
        filled = true;
      }
      if (!filled) throw SearchError("could not refill the population with unique formulas");
    }
    pop = std::move(next);
  }

  finalize_report(report, incumbent);
  return report;
}

namespace {

void collect_nodes(dsl::FormulaAst& node, std::vector<dsl::FormulaAst*>& out) {
  out.push_back(&node);
  for (dsl::FormulaAst& child : node.children) collect_nodes(child, out);
}

dsl::FormulaAst* pick_node(dsl::FormulaAst& expr, Rng& rng) {
  std::vector<dsl::FormulaAst*> nodes;
  collect_nodes(expr, nodes);
  return nodes[rng.below(nodes.size())];
}

}  // namespace

SearchReport ga_run(const SlurpInstance& inst, const GenConfig& gen, const SearchConfig& cfg) {
  check_gen_config(gen);
  check_search_config(cfg);

  dsl::InstanceEnvs envs = dsl::InstanceEnvs::of(inst);
  Rng root(cfg.seed);
  SearchReport report;
  report.method = "ga";
  report.gen = gen;
  report.config = cfg;

  std::vector<Candidate> pop = init_population(gen, cfg.population, root.derive(0));
  std::optional<Candidate> incumbent;
  std::optional<std::size_t> incumbent_len;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    evaluate_population(pop, inst, envs, cfg.workers);
    report.iterations = iter;
    auto lengths = text_lengths(pop);
    if (record_iteration(report, pop, lengths, incumbent, incumbent_len)) {
      verify_winner(*incumbent, inst, envs);
      report.success = true;
      break;
    }
    if (iter == cfg.max_iterations) break;

    auto tournament = [&](Rng& rng) -> const Candidate& {
      std::size_t best = rng.below(pop.size());
      for (int j = 1; j < cfg.tournament_size; ++j) {
        std::size_t ix = rng.below(pop.size());
        if (candidate_better(pop[ix], lengths[ix], pop[best], lengths[best])) best = ix;
      }
      return pop[best];
    };

    std::vector<Candidate> next;
    next.reserve(pop.size());
    Candidate carried;
    carried.text = incumbent->text;
    carried.ast = incumbent->ast;
    next.push_back(std::move(carried));
    while (next.size() < pop.size()) {
      Rng slot_rng = root.derive(static_cast<std::uint64_t>(iter) + 1, next.size());
      const Candidate& parent = tournament(slot_rng);
      double u = slot_rng.next_double();
      dsl::FormulaAst child = parent.ast;
      if (u < cfg.crossover_prob) {
        const Candidate& donor = tournament(slot_rng);
        dsl::FormulaAst donor_ast = donor.ast;
        dsl::FormulaAst* target = pick_node(child.children[0], slot_rng);
        dsl::FormulaAst* source = pick_node(donor_ast.children[0], slot_rng);
        *target = std::move(*source);
      } else if (u < cfg.crossover_prob + cfg.mutation_prob) {
        dsl::FormulaAst* target = pick_node(child.children[0], slot_rng);
        *target = random_expr(gen, gen.max_depth, slot_rng);
      }
      std::string text = dsl::print(child, dsl::Notation::Infix);
      Candidate c;
      if (dsl::codepoint_length(text) > cfg.length_cap) {
        c.text = parent.text;
        c.ast = parent.ast;
      } else {
        c.text = std::move(text);
        c.ast = std::move(child);
      }
      next.push_back(std::move(c));
    }
    pop = std::move(next);
  }

  finalize_report(report, incumbent);
  return report;
}

}  // namespace qtn
