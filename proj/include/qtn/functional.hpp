#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtn/slurp.hpp"
#include "qtn/statistics.hpp"

namespace qtn {

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual void fit(const std::vector<std::pair<int, long long>>& labeled) = 0;
  virtual double score(int object_index) const = 0;
};

// Fixed statistic values; fit is a no-op.
class OracleScorer : public Scorer {
 public:
  OracleScorer(const SlurpInstance& inst, const Statistic& stat);
  void fit(const std::vector<std::pair<int, long long>>& labeled) override;
  double score(int object_index) const override;

 private:
  std::vector<long long> values_;
};

// Ridge least squares over fixed block-tuple features, refit in closed form
// on every supervised step. Instances over NC(n,3) only.
class LinearScorer : public Scorer {
 public:
  explicit LinearScorer(const SlurpInstance& inst);
  void fit(const std::vector<std::pair<int, long long>>& labeled) override;
  double score(int object_index) const override;

 private:
  std::vector<std::vector<double>> features_;
  std::vector<double> weights_;
};

struct ProjectionResult {
  std::vector<long long> labels;  // one per object, satisfies every bag target
  bool changed = false;           // some nearest-integer score differs from its label
  double cost = 0;                // total L1 transport cost
  int forced = 0;                 // homogeneity-propagated assignments honored
  int fallbacks = 0;              // propagated label unavailable, assigned unforced
};

// Per bag: members sorted by ascending score (ties by object order) receive
// the target multiset expanded and sorted ascending, the 1-d L1 minimizer.
ProjectionResult project(const std::vector<double>& scores, const SlurpInstance& inst);

// Refined instances, h in {1, 2}: bags in increasing (m, u); a member that is
// the shift of an already-labeled object is forced to that label plus h while
// the bag's residual target allows it; the rest is matched as in project.
ProjectionResult project_homogeneous(const std::vector<double>& scores,
                                     const SlurpInstance& inst, int h);

struct SelfTrainConfig {
  int max_iters = 50;
  double val_frac = 0.1;
  std::optional<int> h;
  std::uint64_t seed = 0;
};

struct RunResult {
  bool success = false;
  int iterations = 0;
  std::vector<double> costs;  // transport cost per projection pass
  std::vector<long long> labels;
  std::vector<int> val_members;
  int forced = 0;
  int fallbacks = 0;
};

// Alternates scoring, constraint projection, and a supervised refit on the
// training split's pseudo-labels. The seeded validation split is stratified
// by bag, held out from fit, and still projected; success means a projection
// pass changed nothing anywhere.
RunResult self_train(const SlurpInstance& inst, Scorer& scorer, const SelfTrainConfig& cfg);

double disagreement(const std::vector<long long>& labels_a,
                    const std::vector<long long>& labels_b);

std::string run_result_to_json(const RunResult& result, const SlurpInstance& inst,
                               const SelfTrainConfig& cfg);
std::string labels_to_csv(const std::vector<long long>& labels, const SlurpInstance& inst);

}  // namespace qtn
