#include "qtn/functional.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "qtn/errors.hpp"
#include "qtn/rng.hpp"

namespace qtn {

using nlohmann::json;

OracleScorer::OracleScorer(const SlurpInstance& inst, const Statistic& stat) {
  values_.reserve(inst.size());
  for (const auto& p : inst.decode()) values_.push_back(stat.fn(p, inst.k));
}

void OracleScorer::fit(const std::vector<std::pair<int, long long>>&) {}

double OracleScorer::score(int object_index) const {
  return static_cast<double>(values_.at(static_cast<std::size_t>(object_index)));
}

LinearScorer::LinearScorer(const SlurpInstance& inst) {
  features_.reserve(inst.size());
  for (const auto& p : inst.decode()) {
    NC3 e = to_nc3(p);
    auto [a, b, c, d] = e.block_tuple();
    features_.push_back({1.0,
                         static_cast<double>(a),
                         static_cast<double>(b),
                         static_cast<double>(c),
                         static_cast<double>(d),
                         static_cast<double>(inst.n),
                         static_cast<double>(b - a),
                         static_cast<double>(c - b),
                         static_cast<double>(d - c),
                         e.shape == NC3Shape::Triple ? 1.0 : 0.0,
                         e.shape == NC3Shape::Sequential ? 1.0 : 0.0,
                         e.shape == NC3Shape::Nested ? 1.0 : 0.0,
                         static_cast<double>(warmstart(p, inst.k))});
  }
  weights_.assign(features_.empty() ? 0 : features_.front().size(), 0.0);
}

void LinearScorer::fit(const std::vector<std::pair<int, long long>>& labeled) {
  if (labeled.empty()) throw ArgumentError("fit needs at least one labeled object");
  std::size_t dim = weights_.size();
  std::vector<std::vector<double>> normal(dim, std::vector<double>(dim, 0.0));
  std::vector<double> rhs(dim, 0.0);
  for (const auto& [index, label] : labeled) {
    const auto& x = features_.at(static_cast<std::size_t>(index));
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t col = 0; col < dim; ++col) normal[r][col] += x[r] * x[col];
      rhs[r] += x[r] * static_cast<double>(label);
    }
  }
  const double ridge = 1e-6;
  for (std::size_t r = 0; r < dim; ++r) normal[r][r] += ridge;

  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < dim; ++r)
      if (std::abs(normal[r][col]) > std::abs(normal[pivot][col])) pivot = r;
    std::swap(normal[col], normal[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    double head = normal[col][col];
    for (std::size_t r = col + 1; r < dim; ++r) {
      double factor = normal[r][col] / head;
      if (factor == 0) continue;
      for (std::size_t j = col; j < dim; ++j) normal[r][j] -= factor * normal[col][j];
      rhs[r] -= factor * rhs[col];
    }
  }
  for (std::size_t col = dim; col-- > 0;) {
    double acc = rhs[col];
    for (std::size_t j = col + 1; j < dim; ++j) acc -= normal[col][j] * weights_[j];
    weights_[col] = acc / normal[col][col];
  }
}

double LinearScorer::score(int object_index) const {
  const auto& x = features_.at(static_cast<std::size_t>(object_index));
  double out = 0;
  for (std::size_t j = 0; j < x.size(); ++j) out += weights_[j] * x[j];
  return out;
}

namespace {

std::vector<long long> expand_target(const std::map<long long, long long>& target) {
  std::vector<long long> out;
  for (const auto& [value, count] : target)
    out.insert(out.end(), static_cast<std::size_t>(count), value);
  return out;
}

void assign_monotone(const std::vector<double>& scores, const std::vector<int>& members,
                     const std::vector<long long>& expanded, ProjectionResult& result) {
  std::vector<int> order = members;
  std::sort(order.begin(), order.end(), [&scores](int x, int y) {
    if (scores[static_cast<std::size_t>(x)] != scores[static_cast<std::size_t>(y)])
      return scores[static_cast<std::size_t>(x)] < scores[static_cast<std::size_t>(y)];
    return x < y;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto ix = static_cast<std::size_t>(order[i]);
    result.labels[ix] = expanded[i];
    result.cost += std::abs(scores[ix] - static_cast<double>(expanded[i]));
    if (std::llround(scores[ix]) != expanded[i]) result.changed = true;
  }
}

}  // namespace

ProjectionResult project(const std::vector<double>& scores, const SlurpInstance& inst) {
  if (scores.size() != inst.size())
    throw ArgumentError("projection needs one score per object");
  ProjectionResult result;
  result.labels.assign(inst.size(), 0);
  for (const auto& bag : inst.bags)
    assign_monotone(scores, bag.members, expand_target(bag.target), result);
  return result;
}

ProjectionResult project_homogeneous(const std::vector<double>& scores,
                                     const SlurpInstance& inst, int h) {
  if (h != 1 && h != 2)
    throw ArgumentError("homogeneity propagation exists for h in {1, 2} only");
  if (!inst.refined) throw ArgumentError("homogeneous projection needs a refined instance");
  if (scores.size() != inst.size())
    throw ArgumentError("projection needs one score per object");

  auto partitions = inst.decode();
  std::map<std::string, int> index_of;
  for (std::size_t i = 0; i < inst.objects.size(); ++i)
    index_of[inst.objects[i]] = static_cast<int>(i);

  ProjectionResult result;
  result.labels.assign(inst.size(), 0);
  std::vector<char> labeled(inst.size(), 0);

  for (const auto& bag : inst.bags) {
    std::map<long long, long long> residual = bag.target;
    std::vector<int> unforced;
    for (int member : bag.members) {
      std::optional<int> source;
      if (auto prev = unshift(partitions[static_cast<std::size_t>(member)])) {
        auto it = index_of.find(serialize_nc(*prev));
        if (it != index_of.end() && it->second != member &&
            labeled[static_cast<std::size_t>(it->second)])
          source = it->second;
      }
      bool assigned = false;
      if (source) {
        long long want = result.labels[static_cast<std::size_t>(*source)] + h;
        auto slot = residual.find(want);
        if (slot != residual.end() && slot->second > 0) {
          if (--slot->second == 0) residual.erase(slot);
          auto ix = static_cast<std::size_t>(member);
          result.labels[ix] = want;
          result.cost += std::abs(scores[ix] - static_cast<double>(want));
          if (std::llround(scores[ix]) != want) result.changed = true;
          labeled[ix] = 1;
          ++result.forced;
          assigned = true;
        } else {
          ++result.fallbacks;
        }
      }
      if (!assigned) unforced.push_back(member);
    }
    assign_monotone(scores, unforced, expand_target(residual), result);
    for (int member : unforced) labeled[static_cast<std::size_t>(member)] = 1;
  }
  return result;
}

RunResult self_train(const SlurpInstance& inst, Scorer& scorer, const SelfTrainConfig& cfg) {
  if (cfg.max_iters < 1) throw ArgumentError("max_iters must be positive");
  if (cfg.val_frac < 0 || cfg.val_frac >= 1) throw ArgumentError("val_frac must be in [0, 1)");

  Rng rng(cfg.seed);
  RunResult result;
  std::vector<char> in_val(inst.size(), 0);
  for (std::size_t bag_ix = 0; bag_ix < inst.bags.size(); ++bag_ix) {
    std::vector<int> shuffled = inst.bags[bag_ix].members;
    Rng stream = rng.derive(bag_ix);
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[stream.below(i)]);
    auto take = static_cast<std::size_t>(cfg.val_frac * static_cast<double>(shuffled.size()));
    for (std::size_t i = 0; i < take; ++i) {
      in_val[static_cast<std::size_t>(shuffled[i])] = 1;
      result.val_members.push_back(shuffled[i]);
    }
  }
  std::sort(result.val_members.begin(), result.val_members.end());

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    std::vector<double> scores(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i)
      scores[i] = scorer.score(static_cast<int>(i));
    ProjectionResult proj =
        cfg.h ? project_homogeneous(scores, inst, *cfg.h) : project(scores, inst);
    result.iterations = iter;
    result.costs.push_back(proj.cost);
    result.labels = proj.labels;
    result.forced = proj.forced;
    result.fallbacks = proj.fallbacks;
    if (!proj.changed) {
      result.success = true;
      break;
    }
    if (iter == cfg.max_iters) break;
    std::vector<std::pair<int, long long>> train;
    for (std::size_t i = 0; i < inst.size(); ++i)
      if (!in_val[i]) train.emplace_back(static_cast<int>(i), proj.labels[i]);
    scorer.fit(train);
  }
  return result;
}

double disagreement(const std::vector<long long>& labels_a,
                    const std::vector<long long>& labels_b) {
  if (labels_a.size() != labels_b.size() || labels_a.empty())
    throw ArgumentError("disagreement needs two equal-size nonempty labelings");
  std::size_t differing = 0;
  for (std::size_t i = 0; i < labels_a.size(); ++i)
    if (labels_a[i] != labels_b[i]) ++differing;
  return static_cast<double>(differing) / static_cast<double>(labels_a.size());
}

std::string run_result_to_json(const RunResult& result, const SlurpInstance& inst,
                               const SelfTrainConfig& cfg) {
  json root;
  root["success"] = result.success;
  root["iterations"] = result.iterations;
  root["costs"] = result.costs;
  root["forced"] = result.forced;
  root["fallbacks"] = result.fallbacks;
  json config;
  config["max_iters"] = cfg.max_iters;
  config["val_frac"] = cfg.val_frac;
  config["h"] = cfg.h ? json(*cfg.h) : json(nullptr);
  config["seed"] = cfg.seed;
  root["config"] = config;
  json labels;
  for (std::size_t i = 0; i < inst.objects.size(); ++i)
    labels[inst.objects[i]] = result.labels.at(i);
  root["labels"] = labels;
  json val = json::array();
  for (int ix : result.val_members) val.push_back(inst.objects[static_cast<std::size_t>(ix)]);
  root["val_members"] = val;
  return root.dump(2) + "\n";
}

std::string labels_to_csv(const std::vector<long long>& labels, const SlurpInstance& inst) {
  if (labels.size() != inst.size())
    throw ArgumentError("labels do not match the instance");
  std::string out = "partition,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out += inst.objects[i] + ',' + std::to_string(labels[i]) + '\n';
  return out;
}

}  // namespace qtn
