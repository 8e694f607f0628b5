#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qtn {

// Set partition of [1..n] in canonical form: every block ascending, blocks
// ordered by their minimum. Values of this type are always noncrossing;
// construction through from_blocks or parse_nc enforces it.
struct NCPartition {
  int n = 0;
  std::vector<std::vector<int>> blocks;

  bool operator==(const NCPartition&) const = default;

  // Validates (partition of [1..n], noncrossing), canonicalizes, and returns.
  static NCPartition from_blocks(int n, std::vector<std::vector<int>> blocks);
};

// True iff no a<b<c<d exists with {a,c} and {b,d} in two different blocks.
// Throws ArgumentError if blocks is not a partition of [1..n].
bool is_noncrossing(const std::vector<std::vector<int>>& blocks, int n);

// All noncrossing partitions of [1..n] with n-k+1 blocks, ordered
// lexicographically by their serialized text. Requires 1 <= k <= n.
std::vector<NCPartition> enumerate_nc(int n, int k);

// i -> n+1-i on every element, re-canonicalized.
NCPartition flip(const NCPartition& p);

// Adds 1 to every element of every non-singleton block; vacated positions
// become singletons. Requires m_of(p) < n.
NCPartition shift(const NCPartition& p);

// Inverse of shift when defined: subtracts 1 from every non-singleton
// element. Empty when some non-singleton block contains 1.
std::optional<NCPartition> unshift(const NCPartition& p);

// Largest element sitting in a non-singleton block; 0 if all blocks are
// singletons.
int m_of(const NCPartition& p);

// "1,4|2,3|5" -- blocks joined by '|', elements by ',', singletons included.
std::string serialize_nc(const NCPartition& p);

// Inverse of serialize_nc, accepting blocks/elements in any order. Throws
// ParseError with code Malformed / NotPartition / Crossing.
NCPartition parse_nc(std::string_view text, int n);

// The four elements in non-singleton blocks of a partition counted by the
// k=3 family: one 3-element block (Triple) or two 2-element blocks that are
// either side by side (Sequential) or nested.
enum class NC3Shape { Triple, Sequential, Nested };

struct NC3 {
  int n = 0;
  // Sorted elements, a < b <= c < d; Triple stores its middle element twice.
  int a = 0, b = 0, c = 0, d = 0;
  NC3Shape shape = NC3Shape::Triple;

  bool operator==(const NC3&) const = default;

  // Block-order tuple used by the statistic formulas and formula evaluation:
  // Sequential {a,b},{c,d} -> (a,b,c,d); Nested {a,d},{b,c} -> (a,d,b,c);
  // Triple {a,b,d} -> (a,b,b,d).
  std::array<long long, 4> block_tuple() const;
};

// Requires p to have exactly n-2 blocks (the k=3 family).
NC3 to_nc3(const NCPartition& p);
NCPartition from_nc3(const NC3& e);

}  // namespace qtn
