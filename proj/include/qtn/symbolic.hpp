#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qtn/formula.hpp"
#include "qtn/rng.hpp"
#include "qtn/sequence_model.hpp"
#include "qtn/slurp.hpp"

namespace qtn {

struct GenConfig {
  std::string name = "custom";
  int max_depth = 3;
  double arith_weight = 1;
  double comparison_weight = 1;
  double logic_weight = 1;
  double literal_prob = 0.25;
  int min_len = 5;
  int max_len = 60;
  std::uint64_t seed = 0;
};

// The 20 frozen generation presets; configs/presets.json mirrors this table.
const std::vector<GenConfig>& presets();
const GenConfig& preset(std::string_view name);

// Random formula of the form (expr)%3 with expr depth at most max_depth,
// rejection-sampled until the printed infix length lands in
// [min_len, max_len] codepoints. At most 1000 rejections.
dsl::FormulaAst sample_random(const GenConfig& cfg, Rng rng);

struct Candidate {
  std::string text;  // canonical infix print, the identity used for dedupe
  dsl::FormulaAst ast;
  Distance score = Distance::infinite();
  std::array<std::uint64_t, 2> fp{};  // fingerprint hash, meaningful when score is finite
};

// Exactly `size` candidates with pairwise distinct texts.
std::vector<Candidate> init_population(const GenConfig& cfg, std::size_t size, Rng rng);

void evaluate_population(std::vector<Candidate>& pop, const SlurpInstance& inst,
                         const dsl::InstanceEnvs& envs, int workers = 1);

// Best-first indices of the lowest-distance ceil(frac*N) candidates, split
// into a model-fitting corpus and a validation slice from the elite tail.
// Ties break by shorter printed length, then lexicographic text.
struct EliteSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

EliteSplit select_elite(const std::vector<Candidate>& pop, double elite_frac = 0.05,
                        std::size_t holdout_cap = 1000);

// Shannon entropy (bits) of the fingerprint-class distribution over an
// evaluated population; all invalid candidates form one class.
double semantic_entropy(const std::vector<Candidate>& pop);

// Mean next-symbol entropy (bits) over model rollouts.
double syntactic_entropy(const SequenceModel& model, std::size_t sample_count, Rng rng,
                         std::size_t max_len = 200);

struct SearchConfig {
  std::size_t population = 50000;
  double elite_frac = 0.05;
  std::size_t holdout_cap = 1000;
  int max_iterations = 20;
  std::uint64_t seed = 1;
  int workers = 1;  // execution detail; never echoed into reports
  dsl::Notation corpus_notation = dsl::Notation::InfixSpaced;
  int ngram_order = 4;
  double ngram_lambda = 0.01;
  std::size_t entropy_samples = 64;
  int tournament_size = 4;
  double crossover_prob = 0.7;
  double mutation_prob = 0.2;
  std::size_t length_cap = 200;
};

struct SearchReport {
  std::string method;
  GenConfig gen;
  SearchConfig config;
  bool success = false;
  int iterations = 0;
  std::string best_formula;
  Distance best_distance = Distance::infinite();
  std::vector<Distance> best_per_iteration;
  std::vector<Distance> best_so_far;
  std::vector<double> mean_distance;  // over valid candidates; NaN when none
  std::vector<double> invalid_fraction;
  std::vector<double> semantic_entropy;
  std::vector<double> syntactic_entropy;  // one entry per model fit
  std::vector<double> val_perplexity;     // likewise
  std::vector<double> mean_length;
};

std::string report_to_json(const SearchReport& report);

using ModelFactory = std::function<std::unique_ptr<SequenceModel>()>;

// Cross-entropy loop: evaluate, select elite, fit a fresh model on the elite
// corpus, sample the next population (parse-filtered, deduplicated, with the
// incumbent injected and random top-up on retry exhaustion). Success only
// after the winning text re-parses and re-scores to distance zero.
SearchReport cem_run(const SlurpInstance& inst, const GenConfig& gen, const SearchConfig& cfg,
                     const ModelFactory& model_factory = {});

// Generational GA baseline: tournament selection, subtree crossover and
// mutation inside the (expr)%3 wrapper, elitism of one, hard length cap with
// violating children replaced by their first parent.
SearchReport ga_run(const SlurpInstance& inst, const GenConfig& gen, const SearchConfig& cfg);

}  // namespace qtn
