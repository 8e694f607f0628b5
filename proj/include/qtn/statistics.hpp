#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qtn/nc_partition.hpp"
#include "qtn/polyomino.hpp"

namespace qtn {

// --- partition statistics -------------------------------------------------

// Sum over blocks of (max - min - size + 1): elements skipped inside spans.
long long skip(const NCPartition& p);

// The k=3 statistics below read the block-order tuple of an NC3 value.
long long leap(const NC3& e);
long long skew(const NC3& e);
long long mag(const NC3& e);

// skew after flipping the underlying partition.
long long skew_flip(const NC3& e);

// Sum over blocks of (sum - max), minus k(k-1)/2. Counts constraints only up
// to small n; kept as the motivating near-miss.
long long warmstart(const NCPartition& p, int k);

// Sum over ordered block pairs (b1, b2) of #{ i in b2 : i < max b1 < max b2 }.
long long area_nc(const NCPartition& p);

// Greedy arc statistic: left endpoints are the non-maximal elements; right
// endpoints repeat the r-th smallest block max once per gap after the r-th
// smallest block min. Keep the first arc, then always the earliest arc
// starting after the last kept right endpoint; score sum of (n - y) over
// kept right endpoints.
long long mingarc(const NCPartition& p, int k);

// --- polyomino statistics ---------------------------------------------------

// Cells strictly between the paths, minus (w + h - 1).
long long area_pp(const Polyomino& p);

struct BouncePath {
  std::string steps;        // E/N from (0,0) to (w,h)
  std::vector<int> labels;  // per step: E-to-N turns before the step
  long long label_sum() const;
};

// One E step, then alternately north until the upper path and east until the
// lower path.
BouncePath bounce_path(const Polyomino& p);

// label_sum of the bounce path, minus (w + h - 1).
long long bounce_pp(const Polyomino& p);

// Pulled back to partitions through eta: p in NC(n,k) is matched with its
// preimage in PP(k, n-k+1). The preimage tables are cached per (n,k).
long long bounce_nc(const NCPartition& p, int k);
long long bounce_flip_nc(const NCPartition& p, int k);

// --- the exchanging bijection ----------------------------------------------

// (a,b,c,d) -> (d-c, b+d-a-c, d-a, d) on sorted elements; an involution that
// fixes Triples, toggles Sequential/Nested, and swaps (skip, leap).
NC3 exchange_skip_leap(const NC3& e);

// --- registry ----------------------------------------------------------------

using StatFn = std::function<long long(const NCPartition&, int)>;

struct Statistic {
  std::string name;
  StatFn fn;  // (partition, k) -> value
};

const std::vector<Statistic>& statistics();
const Statistic& get_statistic(const std::string& name);

// The h such that s(shift(p)) = s(p) + h for every shiftable p in NC(n,3),
// 3 <= n <= n_max; empty when no single h works.
std::optional<int> homogeneity_degree(const StatFn& s, int n_max);

}  // namespace qtn
