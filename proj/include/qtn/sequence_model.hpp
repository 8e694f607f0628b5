#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qtn/rng.hpp"

namespace qtn {

// Character-level generative model over the formula alphabet plus space.
// next_symbol_distribution returns one probability per vocabulary symbol
// plus a trailing entry for the end-of-sequence event.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;

  virtual const std::vector<std::string>& vocabulary() const = 0;
  virtual void fit(const std::vector<std::string>& corpus) = 0;
  virtual std::string sample(Rng& rng, std::size_t max_len) const = 0;
  virtual std::vector<double> next_symbol_distribution(std::string_view prefix) const = 0;

  virtual double perplexity(const std::vector<std::string>& corpus) const;
};

double distribution_entropy_bits(const std::vector<double>& probabilities);

// Add-lambda smoothed n-gram fit in closed form from symbol counts.
class NGramModel : public SequenceModel {
 public:
  explicit NGramModel(int order = 4, double lambda = 0.01);

  const std::vector<std::string>& vocabulary() const override;
  void fit(const std::vector<std::string>& corpus) override;
  std::string sample(Rng& rng, std::size_t max_len) const override;
  std::vector<double> next_symbol_distribution(std::string_view prefix) const override;
  double perplexity(const std::vector<std::string>& corpus) const override;

  int order() const { return order_; }

 private:
  std::vector<double> row(std::size_t context) const;
  std::size_t boundary_context() const;

  int order_;
  double lambda_;
  std::size_t context_space_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> totals_;
};

}  // namespace qtn
