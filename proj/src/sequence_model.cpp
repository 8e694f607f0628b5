#include "qtn/sequence_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qtn/errors.hpp"
#include "qtn/formula.hpp"

namespace qtn {

namespace {

const std::vector<std::string>& symbol_table() {
  static const std::vector<std::string> symbols = {
      "a", "b", "c", "d", "i", "0", "1", "2", "3", "+",      "-",
      "%", "(", ")", "∨", "∧", "¬", ">", "<", "=", " "};
  return symbols;
}

constexpr std::size_t kBoundary = 21;  // BOS in contexts, EOS as an outcome
constexpr std::size_t kVocab = 22;

const std::map<char32_t, std::size_t>& codepoint_ids() {
  static const std::map<char32_t, std::size_t> ids = [] {
    std::map<char32_t, std::size_t> out;
    const auto& symbols = symbol_table();
    for (std::size_t i = 0; i < symbols.size(); ++i)
      out[dsl::utf8_decode(symbols[i]).front()] = i;
    return out;
  }();
  return ids;
}

std::vector<std::size_t> encode(std::string_view text) {
  std::vector<std::size_t> out;
  const auto& ids = codepoint_ids();
  for (char32_t cp : dsl::utf8_decode(text)) {
    auto it = ids.find(cp);
    if (it == ids.end()) throw ArgumentError("text contains a symbol outside the model alphabet");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

double distribution_entropy_bits(const std::vector<double>& probabilities) {
  double bits = 0;
  for (double p : probabilities)
    if (p > 0) bits -= p * std::log2(p);
  return bits;
}

double SequenceModel::perplexity(const std::vector<std::string>& corpus) const {
  if (corpus.empty()) throw ArgumentError("perplexity of an empty corpus");
  const auto& vocab = vocabulary();
  double log_sum = 0;
  std::size_t events = 0;
  for (const auto& text : corpus) {
    auto cps = dsl::utf8_decode(text);
    std::string prefix;
    for (std::size_t i = 0; i <= cps.size(); ++i) {
      auto dist = next_symbol_distribution(prefix);
      std::size_t outcome = dist.size() - 1;
      std::string symbol;
      if (i < cps.size()) {
        dsl::utf8_append(symbol, cps[i]);
        auto it = std::find(vocab.begin(), vocab.end(), symbol);
        if (it == vocab.end())
          throw ArgumentError("text contains a symbol outside the model alphabet");
        outcome = static_cast<std::size_t>(it - vocab.begin());
      }
      log_sum -= std::log2(dist[outcome]);
      ++events;
      prefix += symbol;
    }
  }
  return std::exp2(log_sum / static_cast<double>(events));
}

NGramModel::NGramModel(int order, double lambda) : order_(order), lambda_(lambda) {
  if (order < 2 || order > 6) throw ArgumentError("n-gram order must be in [2, 6]");
  if (lambda <= 0) throw ArgumentError("n-gram smoothing must be positive");
  context_space_ = 1;
  for (int j = 1; j < order_; ++j) context_space_ *= kVocab;
  counts_.assign(context_space_ * kVocab, 0);
  totals_.assign(context_space_, 0);
}

const std::vector<std::string>& NGramModel::vocabulary() const { return symbol_table(); }

std::size_t NGramModel::boundary_context() const {
  std::size_t ctx = 0;
  for (int j = 1; j < order_; ++j) ctx = ctx * kVocab + kBoundary;
  return ctx;
}

void NGramModel::fit(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw SearchError("cannot fit a sequence model on an empty corpus");
  counts_.assign(context_space_ * kVocab, 0);
  totals_.assign(context_space_, 0);
  for (const auto& text : corpus) {
    std::size_t ctx = boundary_context();
    auto ids = encode(text);
    ids.push_back(kBoundary);
    for (std::size_t s : ids) {
      ++counts_[ctx * kVocab + s];
      ++totals_[ctx];
      ctx = (ctx * kVocab + s) % context_space_;
    }
  }
}

std::vector<double> NGramModel::row(std::size_t context) const {
  std::vector<double> out(kVocab);
  double denom = totals_[context] + lambda_ * kVocab;
  for (std::size_t s = 0; s < kVocab; ++s)
    out[s] = (counts_[context * kVocab + s] + lambda_) / denom;
  return out;
}

std::string NGramModel::sample(Rng& rng, std::size_t max_len) const {
  std::string out;
  std::size_t ctx = boundary_context();
  std::size_t emitted = 0;
  while (emitted < max_len) {
    auto dist = row(ctx);
    double u = rng.next_double();
    std::size_t pick = kVocab - 1;
    double acc = 0;
    for (std::size_t s = 0; s < kVocab; ++s) {
      acc += dist[s];
      if (u < acc) {
        pick = s;
        break;
      }
    }
    if (pick == kBoundary) break;
    out += symbol_table()[pick];
    ++emitted;
    ctx = (ctx * kVocab + pick) % context_space_;
  }
  return out;
}

std::vector<double> NGramModel::next_symbol_distribution(std::string_view prefix) const {
  auto ids = encode(prefix);
  std::size_t ctx = boundary_context();
  for (std::size_t s : ids) ctx = (ctx * kVocab + s) % context_space_;
  return row(ctx);
}

double NGramModel::perplexity(const std::vector<std::string>& corpus) const {
  if (corpus.empty()) throw ArgumentError("perplexity of an empty corpus");
  double log_sum = 0;
  std::size_t events = 0;
  for (const auto& text : corpus) {
    std::size_t ctx = boundary_context();
    auto ids = encode(text);
    ids.push_back(kBoundary);
    for (std::size_t s : ids) {
      double denom = totals_[ctx] + lambda_ * kVocab;
      log_sum -= std::log2((counts_[ctx * kVocab + s] + lambda_) / denom);
      ++events;
      ctx = (ctx * kVocab + s) % context_space_;
    }
  }
  return std::exp2(log_sum / static_cast<double>(events));
}

}  // namespace qtn
