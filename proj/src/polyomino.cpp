#include "qtn/polyomino.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "qtn/errors.hpp"

namespace qtn {

namespace {

void check_steps(std::string_view path, int w, int h, const char* which) {
  if (static_cast<int>(path.size()) != w + h)
    throw ArgumentError(std::string(which) + " path has wrong length");
  int e = 0, n = 0;
  for (char ch : path) {
    if (ch == 'E') ++e;
    else if (ch == 'N') ++n;
    else throw ArgumentError(std::string(which) + " path has a step other than E/N");
  }
  if (e != w || n != h)
    throw ArgumentError(std::string(which) + " path has wrong step counts");
}

// Bit per lattice point, excluding the two shared endpoints.
std::vector<std::uint64_t> interior_mask(std::string_view path, int w, int h) {
  std::size_t points = static_cast<std::size_t>(w + 1) * (h + 1);
  std::vector<std::uint64_t> mask((points + 63) / 64, 0);
  int x = 0, y = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (path[i] == 'E') ++x; else ++y;
    std::size_t idx = static_cast<std::size_t>(x) * (h + 1) + y;
    mask[idx / 64] |= 1ull << (idx % 64);
  }
  return mask;
}

bool masks_disjoint(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & b[i]) return false;
  return true;
}

std::vector<int> rise_positions(std::string_view path) {
  std::vector<int> out;
  int x = 0;
  for (char ch : path) {
    if (ch == 'E') ++x;
    else out.push_back(x);
  }
  return out;
}

std::vector<int> run_heights(std::string_view path) {
  std::vector<int> out;
  int y = 0;
  for (char ch : path) {
    if (ch == 'N') ++y;
    else out.push_back(y);
  }
  return out;
}

bool path_contains(std::string_view path, int px, int py) {
  int x = 0, y = 0;
  if (px == 0 && py == 0) return true;
  for (char ch : path) {
    if (ch == 'E') ++x; else ++y;
    if (x == px && y == py) return true;
  }
  return false;
}

}  // namespace

Polyomino Polyomino::from_paths(int w, int h, std::string lower, std::string upper) {
  if (w < 1 || h < 1) throw ArgumentError("polyomino needs w, h >= 1");
  check_steps(lower, w, h, "lower");
  check_steps(upper, w, h, "upper");
  if (lower.front() != 'E') throw ArgumentError("lower path must start with E");
  if (upper.front() != 'N') throw ArgumentError("upper path must start with N");
  if (!masks_disjoint(interior_mask(lower, w, h), interior_mask(upper, w, h)))
    throw ArgumentError("paths meet away from the endpoints");
  return Polyomino{w, h, std::move(lower), std::move(upper)};
}

std::vector<int> Polyomino::lower_rise() const { return rise_positions(lower); }
std::vector<int> Polyomino::upper_rise() const { return rise_positions(upper); }
std::vector<int> Polyomino::lower_run() const { return run_heights(lower); }
std::vector<int> Polyomino::upper_run() const { return run_heights(upper); }

bool Polyomino::lower_contains(int x, int y) const { return path_contains(lower, x, y); }
bool Polyomino::upper_contains(int x, int y) const { return path_contains(upper, x, y); }

std::vector<Polyomino> enumerate_pp(int w, int h) {
  if (w < 1 || h < 1) throw ArgumentError("enumerate_pp requires w, h >= 1");
  std::string base(static_cast<std::size_t>(w), 'E');
  base.append(static_cast<std::size_t>(h), 'N');

  std::vector<std::string> lowers, uppers;
  std::vector<std::vector<std::uint64_t>> lower_masks, upper_masks;
  std::string path = base;  // already the lex-least arrangement
  do {
    if (path.front() == 'E') {
      lowers.push_back(path);
      lower_masks.push_back(interior_mask(path, w, h));
    } else {
      uppers.push_back(path);
      upper_masks.push_back(interior_mask(path, w, h));
    }
  } while (std::next_permutation(path.begin(), path.end()));

  // Outer loop lex over lowers, inner lex over uppers: the serialized texts
  // come out already sorted.
  std::vector<Polyomino> out;
  for (std::size_t i = 0; i < lowers.size(); ++i)
    for (std::size_t j = 0; j < uppers.size(); ++j)
      if (masks_disjoint(lower_masks[i], upper_masks[j]))
        out.push_back(Polyomino{w, h, lowers[i], uppers[j]});
  return out;
}

Polyomino transpose(const Polyomino& p) {
  auto swap_steps = [](std::string path) {
    for (char& ch : path) ch = (ch == 'E') ? 'N' : 'E';
    return path;
  };
  return Polyomino{p.h, p.w, swap_steps(p.upper), swap_steps(p.lower)};
}

std::string serialize_pp(const Polyomino& p) {
  return std::to_string(p.w) + "," + std::to_string(p.h) + ":" + p.lower + "/" + p.upper;
}

Polyomino parse_pp(std::string_view text) {
  auto colon = text.find(':');
  auto comma = text.find(',');
  auto slash = text.find('/');
  if (colon == std::string_view::npos || comma == std::string_view::npos ||
      slash == std::string_view::npos || comma > colon || slash < colon)
    throw ParseError(ParseCode::Malformed, 0, "expected w,h:LOWER/UPPER");
  int w = 0, h = 0;
  auto parse_int = [&](std::string_view s, int& out) {
    auto [next, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || next != s.data() + s.size())
      throw ParseError(ParseCode::Malformed, 0, "bad dimension");
  };
  parse_int(text.substr(0, comma), w);
  parse_int(text.substr(comma + 1, colon - comma - 1), h);
  try {
    return Polyomino::from_paths(w, h, std::string(text.substr(colon + 1, slash - colon - 1)),
                                 std::string(text.substr(slash + 1)));
  } catch (const ArgumentError& e) {
    throw ParseError(ParseCode::Malformed, 0, e.what());
  }
}

NCPartition eta(const Polyomino& p) {
  const int w = p.w, h = p.h;
  const std::vector<int> low = p.lower_rise();   // size h
  const std::vector<int> up = p.upper_rise();    // size h

  // Floor-adjacent cells by row: row 0 covers [0, low[0]); row y covers
  // [low[y-1]-1, low[y]). Index them 1.. in that visiting order.
  std::vector<int> floor_row;  // floor_row[label-1]
  for (int y = 0; y < h; ++y) {
    int begin = (y == 0) ? 0 : low[static_cast<std::size_t>(y - 1)] - 1;
    int end = low[static_cast<std::size_t>(y)];
    for (int x = begin; x < end; ++x) floor_row.push_back(y);
  }
  const int n = w + h - 1;
  if (static_cast<int>(floor_row.size()) != n)
    throw InternalError("floor cell count mismatch");

  // Ceiling-adjacent cells row y cover [up[y], up[y+1]+1) (top row ends at w).
  std::set<int> available;
  int next_label = 1;
  std::vector<std::vector<int>> blocks;
  for (int y = 0; y < h; ++y) {
    while (next_label <= n && floor_row[static_cast<std::size_t>(next_label - 1)] == y)
      available.insert(next_label++);
    int begin = up[static_cast<std::size_t>(y)];
    int end = (y + 1 < h) ? up[static_cast<std::size_t>(y + 1)] + 1 : w;
    std::vector<int> block;
    for (int x = begin; x < end; ++x) {
      if (available.empty()) throw InternalError("ran out of labels in eta");
      auto it = std::prev(available.end());
      block.push_back(*it);
      available.erase(it);
    }
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
  }
  return NCPartition::from_blocks(n, std::move(blocks));
}

}  // namespace qtn
