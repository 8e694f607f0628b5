#include "qtn/statistics.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

#include "qtn/errors.hpp"

namespace qtn {

long long skip(const NCPartition& p) {
  long long total = 0;
  for (const auto& block : p.blocks)
    total += block.back() - block.front() - static_cast<long long>(block.size()) + 1;
  return total;
}

long long leap(const NC3& e) {
  auto [a, b, c, d] = e.block_tuple();
  if (e.shape == NC3Shape::Triple) return b - 2;
  return c - 2 + std::max(0ll, c - b);
}

long long skew(const NC3& e) {
  auto [a, b, c, d] = e.block_tuple();
  if (e.shape == NC3Shape::Triple) return b - 2;
  return c - 2 + (b < c ? a : 0);
}

long long mag(const NC3& e) {
  // Adds the two block minima, then pulls back by half the gap between the
  // two smallest elements (which straddle the blocks except when nested).
  long long second_min = e.shape == NC3Shape::Sequential ? e.c : e.b;
  return e.a + second_min - 2 - (e.b - e.a + 1) / 2;
}

long long skew_flip(const NC3& e) { return skew(to_nc3(flip(from_nc3(e)))); }

long long warmstart(const NCPartition& p, int k) {
  long long total = 0;
  for (const auto& block : p.blocks) {
    for (int x : block) total += x;
    total -= block.back();
  }
  return total - static_cast<long long>(k) * (k - 1) / 2;
}

long long area_nc(const NCPartition& p) {
  long long total = 0;
  for (const auto& b1 : p.blocks) {
    for (const auto& b2 : p.blocks) {
      if (b2.back() <= b1.back()) continue;
      for (int i : b2)
        if (i < b1.back()) ++total;
    }
  }
  return total;
}

long long mingarc(const NCPartition& p, int k) {
  const int n = p.n;
  if (static_cast<int>(p.blocks.size()) != n - k + 1)
    throw ArgumentError("mingarc: partition block count disagrees with k");

  std::vector<int> minima, maxima;
  for (const auto& block : p.blocks) {
    minima.push_back(block.front());
    maxima.push_back(block.back());
  }
  std::sort(minima.begin(), minima.end());
  std::sort(maxima.begin(), maxima.end());
  minima.push_back(n + 1);

  std::vector<int> rights;
  for (std::size_t r = 0; r + 1 < minima.size(); ++r) {
    int gap = minima[r + 1] - minima[r] - 1;
    for (int t = 0; t < gap; ++t) rights.push_back(maxima[r]);
  }

  std::vector<int> lefts;
  std::vector<char> is_max(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& block : p.blocks) is_max[static_cast<std::size_t>(block.back())] = 1;
  for (int x = 1; x <= n; ++x)
    if (!is_max[static_cast<std::size_t>(x)]) lefts.push_back(x);

  if (lefts.size() != rights.size() || static_cast<int>(lefts.size()) != k - 1)
    throw InternalError("mingarc endpoint counts disagree");

  long long total = 0;
  int last_right = -1;
  for (std::size_t i = 0; i < lefts.size(); ++i) {
    if (i == 0 || lefts[i] > last_right) {
      total += n - rights[i];
      last_right = rights[i];
    }
  }
  return total;
}

long long area_pp(const Polyomino& p) {
  const auto low = p.lower_run();
  const auto up = p.upper_run();
  long long cells = 0;
  for (int x = 0; x < p.w; ++x)
    cells += up[static_cast<std::size_t>(x)] - low[static_cast<std::size_t>(x)];
  return cells - (p.w + p.h - 1);
}

long long BouncePath::label_sum() const {
  long long total = 0;
  for (int v : labels) total += v;
  return total;
}

BouncePath bounce_path(const Polyomino& p) {
  BouncePath out;
  int x = 0, y = 0, turns = 0;
  auto step = [&](char ch) {
    if (ch == 'N' && !out.steps.empty() && out.steps.back() == 'E') ++turns;
    out.steps += ch;
    out.labels.push_back(turns);
    if (ch == 'E') ++x; else ++y;
  };
  step('E');
  std::size_t guard = 4 * static_cast<std::size_t>(p.w + p.h) + 4;
  while (x != p.w || y != p.h) {
    if (out.steps.size() > guard) throw InternalError("bounce path does not terminate");
    int ny = -1;
    for (int yy = y + 1; yy <= p.h; ++yy)
      if (p.upper_contains(x, yy)) { ny = yy; break; }
    if (ny < 0) throw InternalError("bounce path found no ceiling");
    while (y < ny) step('N');
    if (x == p.w && y == p.h) break;
    int nx = -1;
    for (int xx = x + 1; xx <= p.w; ++xx)
      if (p.lower_contains(xx, y)) { nx = xx; break; }
    if (nx < 0) throw InternalError("bounce path found no floor");
    while (x < nx) step('E');
  }
  return out;
}

long long bounce_pp(const Polyomino& p) {
  return bounce_path(p).label_sum() - (p.w + p.h - 1);
}

namespace {

// eta is a bijection PP(k, n-k+1) -> NC(n, k); bounce on partitions looks up
// the unique preimage. Cached, since pairing checks sweep whole families.
const Polyomino& eta_preimage(const NCPartition& p, int k) {
  static std::mutex mu;
  static std::unordered_map<long long, std::unordered_map<std::string, Polyomino>> cache;
  const int n = p.n;
  if (k < 1 || k > n) throw ArgumentError("bounce_nc requires 1 <= k <= n");
  long long key = static_cast<long long>(n) * 64 + k;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::unordered_map<std::string, Polyomino> table;
    for (const auto& pp : enumerate_pp(k, n - k + 1)) {
      auto nc = eta(pp);
      if (!table.emplace(serialize_nc(nc), pp).second)
        throw InternalError("eta is not injective on this family");
    }
    it = cache.emplace(key, std::move(table)).first;
  }
  auto found = it->second.find(serialize_nc(p));
  if (found == it->second.end())
    throw InternalError("partition has no eta preimage");
  return found->second;
}

}  // namespace

long long bounce_nc(const NCPartition& p, int k) {
  return bounce_pp(eta_preimage(p, k));
}

long long bounce_flip_nc(const NCPartition& p, int k) {
  return bounce_nc(flip(p), k);
}

NC3 exchange_skip_leap(const NC3& e) {
  int a = e.a, b = e.b, c = e.c, d = e.d;
  int a2 = d - c, b2 = b + d - a - c, c2 = d - a, d2 = d;
  NC3Shape shape;
  if (b2 == c2) shape = NC3Shape::Triple;
  else shape = (e.shape == NC3Shape::Sequential) ? NC3Shape::Nested : NC3Shape::Sequential;
  return NC3{e.n, a2, b2, c2, d2, shape};
}

const std::vector<Statistic>& statistics() {
  static const std::vector<Statistic> table = {
      {"skip", [](const NCPartition& p, int) { return skip(p); }},
      {"leap", [](const NCPartition& p, int) { return leap(to_nc3(p)); }},
      {"skew", [](const NCPartition& p, int) { return skew(to_nc3(p)); }},
      {"skewflip", [](const NCPartition& p, int) { return skew_flip(to_nc3(p)); }},
      {"mag", [](const NCPartition& p, int) { return mag(to_nc3(p)); }},
      {"warmstart", [](const NCPartition& p, int k) { return warmstart(p, k); }},
      {"area", [](const NCPartition& p, int) { return area_nc(p); }},
      {"bounce", [](const NCPartition& p, int k) { return bounce_nc(p, k); }},
      {"bounceflip", [](const NCPartition& p, int k) { return bounce_flip_nc(p, k); }},
      {"mingarc", [](const NCPartition& p, int k) { return mingarc(p, k); }},
  };
  return table;
}

const Statistic& get_statistic(const std::string& name) {
  for (const auto& s : statistics())
    if (s.name == name) return s;
  throw ArgumentError("unknown statistic: " + name);
}

std::optional<int> homogeneity_degree(const StatFn& s, int n_max) {
  std::optional<int> degree;
  for (int n = 3; n <= n_max; ++n) {
    for (const auto& p : enumerate_nc(n, 3)) {
      if (m_of(p) >= n) continue;
      long long h = s(shift(p), 3) - s(p, 3);
      if (!degree) degree = static_cast<int>(h);
      else if (*degree != h) return std::nullopt;
    }
  }
  return degree;
}

}  // namespace qtn
