#include "qtn/nc_partition.hpp"

#include <algorithm>
#include <charconv>

#include "qtn/errors.hpp"

namespace qtn {

namespace {

void check_partition(const std::vector<std::vector<int>>& blocks, int n) {
  if (n < 1) throw ArgumentError("partition ground set must be nonempty");
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  int count = 0;
  for (const auto& block : blocks) {
    if (block.empty()) throw ArgumentError("empty block");
    for (int x : block) {
      if (x < 1 || x > n) throw ArgumentError("element out of range");
      if (seen[static_cast<std::size_t>(x)]) throw ArgumentError("repeated element");
      seen[static_cast<std::size_t>(x)] = 1;
      ++count;
    }
  }
  if (count != n) throw ArgumentError("blocks do not cover [1..n]");
}

void canonicalize(std::vector<std::vector<int>>& blocks) {
  for (auto& block : blocks) std::sort(block.begin(), block.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
}

// Two disjoint sorted blocks cross iff walking their merged elements changes
// ownership at least three times (pattern x..y..x..y).
bool blocks_cross(const std::vector<int>& x, const std::vector<int>& y) {
  std::size_t i = 0, j = 0;
  int alternations = 0;
  int last = -1;  // 0 = from x, 1 = from y
  while (i < x.size() || j < y.size()) {
    int from = (j >= y.size() || (i < x.size() && x[i] < y[j])) ? 0 : 1;
    if (from == 0) ++i; else ++j;
    if (last != -1 && from != last) ++alternations;
    last = from;
  }
  return alternations >= 3;
}

}  // namespace

bool is_noncrossing(const std::vector<std::vector<int>>& blocks, int n) {
  check_partition(blocks, n);
  auto sorted = blocks;
  for (auto& b : sorted) std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j)
      if (blocks_cross(sorted[i], sorted[j])) return false;
  return true;
}

NCPartition NCPartition::from_blocks(int n, std::vector<std::vector<int>> blocks) {
  if (!is_noncrossing(blocks, n)) throw ArgumentError("blocks cross");
  canonicalize(blocks);
  return NCPartition{n, std::move(blocks)};
}

std::vector<NCPartition> enumerate_nc(int n, int k) {
  if (k < 1 || k > n) throw ArgumentError("enumerate_nc requires 1 <= k <= n");
  const int want_blocks = n - k + 1;
  std::vector<NCPartition> out;
  std::vector<std::vector<int>> blocks;

  // Place 1..n in order; each element opens a block or joins one. Joining a
  // block whose max is m is legal iff no other block's span strictly
  // contains m, which is exactly the incremental noncrossing condition.
  auto rec = [&](auto&& self, int i) -> void {
    int placed_blocks = static_cast<int>(blocks.size());
    if (placed_blocks > want_blocks) return;
    int remaining = n - i + 1;
    if (placed_blocks + remaining < want_blocks) return;
    if (i > n) {
      if (placed_blocks == want_blocks) out.push_back(NCPartition{n, blocks});
      return;
    }
    blocks.push_back({i});
    self(self, i + 1);
    blocks.pop_back();
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      int m = blocks[j].back();
      bool legal = true;
      for (std::size_t g = 0; g < blocks.size(); ++g) {
        if (g == j) continue;
        if (blocks[g].front() < m && m < blocks[g].back()) {
          legal = false;
          break;
        }
      }
      if (!legal) continue;
      blocks[j].push_back(i);
      self(self, i + 1);
      blocks[j].pop_back();
    }
  };
  rec(rec, 1);

  std::sort(out.begin(), out.end(), [](const NCPartition& x, const NCPartition& y) {
    return serialize_nc(x) < serialize_nc(y);
  });
  return out;
}

NCPartition flip(const NCPartition& p) {
  std::vector<std::vector<int>> blocks;
  blocks.reserve(p.blocks.size());
  for (const auto& block : p.blocks) {
    std::vector<int> image;
    image.reserve(block.size());
    for (int x : block) image.push_back(p.n + 1 - x);
    blocks.push_back(std::move(image));
  }
  canonicalize(blocks);
  return NCPartition{p.n, std::move(blocks)};
}

NCPartition shift(const NCPartition& p) {
  if (m_of(p) >= p.n) throw ArgumentError("shift would push an element past n");
  std::vector<std::vector<int>> blocks;
  std::vector<char> used(static_cast<std::size_t>(p.n) + 1, 0);
  for (const auto& block : p.blocks) {
    if (block.size() < 2) continue;
    std::vector<int> moved;
    moved.reserve(block.size());
    for (int x : block) {
      moved.push_back(x + 1);
      used[static_cast<std::size_t>(x + 1)] = 1;
    }
    blocks.push_back(std::move(moved));
  }
  for (int x = 1; x <= p.n; ++x)
    if (!used[static_cast<std::size_t>(x)]) blocks.push_back({x});
  canonicalize(blocks);
  return NCPartition{p.n, std::move(blocks)};
}

std::optional<NCPartition> unshift(const NCPartition& p) {
  std::vector<std::vector<int>> blocks;
  std::vector<char> used(static_cast<std::size_t>(p.n) + 1, 0);
  for (const auto& block : p.blocks) {
    if (block.size() < 2) continue;
    if (block.front() <= 1) return std::nullopt;
    std::vector<int> moved;
    moved.reserve(block.size());
    for (int x : block) {
      moved.push_back(x - 1);
      used[static_cast<std::size_t>(x - 1)] = 1;
    }
    blocks.push_back(std::move(moved));
  }
  for (int x = 1; x <= p.n; ++x)
    if (!used[static_cast<std::size_t>(x)]) blocks.push_back({x});
  canonicalize(blocks);
  return NCPartition{p.n, std::move(blocks)};
}

int m_of(const NCPartition& p) {
  int m = 0;
  for (const auto& block : p.blocks)
    if (block.size() >= 2) m = std::max(m, block.back());
  return m;
}

std::string serialize_nc(const NCPartition& p) {
  std::string out;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (i) out += '|';
    const auto& block = p.blocks[i];
    for (std::size_t j = 0; j < block.size(); ++j) {
      if (j) out += ',';
      out += std::to_string(block[j]);
    }
  }
  return out;
}

NCPartition parse_nc(std::string_view text, int n) {
  if (text.empty()) throw ParseError(ParseCode::Malformed, 0, "empty partition text");
  std::vector<std::vector<int>> blocks(1);
  std::size_t pos = 0;
  bool expect_number = true;
  while (pos < text.size()) {
    char ch = text[pos];
    if (ch == '|' || ch == ',') {
      if (expect_number)
        throw ParseError(ParseCode::Malformed, pos, "separator where a number was expected");
      if (ch == '|') blocks.emplace_back();
      expect_number = true;
      ++pos;
      continue;
    }
    if (ch < '0' || ch > '9')
      throw ParseError(ParseCode::Malformed, pos, "unexpected character in partition text");
    int value = 0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [next, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc())
      throw ParseError(ParseCode::Malformed, pos, "bad number in partition text");
    blocks.back().push_back(value);
    pos = static_cast<std::size_t>(next - text.data());
    expect_number = false;
  }
  if (expect_number)
    throw ParseError(ParseCode::Malformed, text.size(), "partition text ends with a separator");

  try {
    check_partition(blocks, n);
  } catch (const ArgumentError& e) {
    throw ParseError(ParseCode::NotPartition, 0, e.what());
  }
  if (!is_noncrossing(blocks, n))
    throw ParseError(ParseCode::Crossing, 0, "blocks cross");
  canonicalize(blocks);
  return NCPartition{n, std::move(blocks)};
}

std::array<long long, 4> NC3::block_tuple() const {
  switch (shape) {
    case NC3Shape::Sequential: return {a, b, c, d};
    case NC3Shape::Nested: return {a, d, b, c};
    case NC3Shape::Triple: return {a, b, b, d};
  }
  throw InternalError("bad NC3 shape");
}

NC3 to_nc3(const NCPartition& p) {
  if (static_cast<int>(p.blocks.size()) != p.n - 2)
    throw ArgumentError("to_nc3 requires a partition with n-2 blocks");
  std::vector<const std::vector<int>*> fat;
  for (const auto& block : p.blocks)
    if (block.size() >= 2) fat.push_back(&block);
  if (fat.size() == 1 && fat[0]->size() == 3) {
    const auto& t = *fat[0];
    return NC3{p.n, t[0], t[1], t[1], t[2], NC3Shape::Triple};
  }
  if (fat.size() == 2 && fat[0]->size() == 2 && fat[1]->size() == 2) {
    std::array<int, 4> s = {(*fat[0])[0], (*fat[0])[1], (*fat[1])[0], (*fat[1])[1]};
    std::sort(s.begin(), s.end());
    // The block containing the smallest element either stops at s[1]
    // (sequential) or reaches s[3] (nested); crossing is impossible here.
    bool nested = (fat[0]->back() == s[3]);
    return NC3{p.n, s[0], s[1], s[2], s[3],
               nested ? NC3Shape::Nested : NC3Shape::Sequential};
  }
  throw InternalError("partition with n-2 blocks has unexpected block sizes");
}

NCPartition from_nc3(const NC3& e) {
  if (e.n < 3) throw ArgumentError("NC3 needs n >= 3");
  std::vector<std::vector<int>> blocks;
  switch (e.shape) {
    case NC3Shape::Triple:
      if (!(e.a < e.b && e.b == e.c && e.c < e.d))
        throw ArgumentError("bad Triple element order");
      blocks.push_back({e.a, e.b, e.d});
      break;
    case NC3Shape::Sequential:
      if (!(e.a < e.b && e.b < e.c && e.c < e.d))
        throw ArgumentError("bad Sequential element order");
      blocks.push_back({e.a, e.b});
      blocks.push_back({e.c, e.d});
      break;
    case NC3Shape::Nested:
      if (!(e.a < e.b && e.b < e.c && e.c < e.d))
        throw ArgumentError("bad Nested element order");
      blocks.push_back({e.a, e.d});
      blocks.push_back({e.b, e.c});
      break;
  }
  if (e.d > e.n) throw ArgumentError("NC3 element exceeds n");
  std::vector<char> used(static_cast<std::size_t>(e.n) + 1, 0);
  for (const auto& block : blocks)
    for (int x : block) used[static_cast<std::size_t>(x)] = 1;
  for (int x = 1; x <= e.n; ++x)
    if (!used[static_cast<std::size_t>(x)]) blocks.push_back({x});
  canonicalize(blocks);
  return NCPartition{e.n, std::move(blocks)};
}

}  // namespace qtn
